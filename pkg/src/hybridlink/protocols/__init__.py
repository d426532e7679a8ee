"""Protocols module for heralded entanglement between two hybrids."""

from hybridlink.protocols.base import BaseProtocol, decay_integral
from hybridlink.protocols.bell import BellProtocol, bell_coherent, bell_single_photon
from hybridlink.protocols.chsh import (
    CHSH_SETTINGS,
    ChshProtocol,
    chsh_coherent,
    chsh_combination,
    chsh_single_photon,
    joint_probabilities,
)
from hybridlink.protocols.montecarlo import make_protocol, monte_carlo_protocol

__all__ = [
    "BaseProtocol",
    "BellProtocol",
    "CHSH_SETTINGS",
    "ChshProtocol",
    "bell_coherent",
    "bell_single_photon",
    "chsh_coherent",
    "chsh_combination",
    "chsh_single_photon",
    "decay_integral",
    "joint_probabilities",
    "make_protocol",
    "monte_carlo_protocol",
]
