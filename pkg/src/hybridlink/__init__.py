"""
hybridlink

Simulator library and CLI for hybrids of a molecule pair in a waveguide and a
superconducting charge qubit: dressed states, Raman transfer probabilities,
heralded entanglement protocols and electrostatic coupling estimates.
"""

__version__ = "0.1.0"

from hybridlink.config import settings

__all__ = ["settings", "__version__"]
