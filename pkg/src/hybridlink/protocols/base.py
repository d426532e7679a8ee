"""
Base protocol interface for heralded entanglement between two hybrids.

Defines the abstract interface that the CHSH and Bell-state protocols implement.
Positions along the probe pulse are measured in photons, s in [0, n_bar].
"""

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
import numpy.typing as npt

from hybridlink.errors import DomainError
from hybridlink.models.schemas import (
    DephasingModel,
    HybridParams,
    ProtocolKind,
    ProtocolResult,
    RateSet,
)
from hybridlink.params import flux_for_n_bar, validate
from hybridlink.rates import compute_rates

FloatArray = npt.NDArray[np.float64]


def decay_integral(rate: float, span: float) -> float:
    """Integral of exp(-rate * s) over [0, span], continuous through rate = 0."""
    x = rate * span
    if abs(x) < 1e-10:
        return span * (1.0 - 0.5 * x)
    return -math.expm1(-x) / rate


def sample_truncated_exponential(
    u: FloatArray,
    rate: float,
    span: float,
) -> FloatArray:
    """Inverse-CDF sample of a density proportional to exp(-rate * s) on [0, span]."""
    x = rate * span
    if abs(x) < 1e-10:
        return u * span
    return -np.log1p(u * math.expm1(-x)) / rate


class BaseProtocol(ABC):
    """
    Abstract base class for heralded entanglement protocols.

    Subclasses provide the single-photon and coherent-state closed forms and the
    click statistics used by the Monte Carlo estimator.
    """

    # Protocol this class implements
    kind: ProtocolKind

    def __init__(
        self,
        params: HybridParams,
        rates: Optional[RateSet] = None,
        model: Optional[DephasingModel] = None,
    ):
        """
        Initialize the protocol for two identical hybrids.

        Args:
            params: Hybrid parameters.
            rates: Precomputed rate set. Computed from params when omitted.
            model: Dephasing model used when the rates are computed here.
        """
        self.params = validate(params)
        self.rates = rates if rates is not None else compute_rates(self.params, model)

    @property
    def p_a(self) -> float:
        """Raman probability per photon, P_R + P_RO."""
        return self.rates.p_a

    @abstractmethod
    def single_photon(self) -> ProtocolResult:
        """
        Evaluate the protocol for a single-photon input.

        Returns:
            ProtocolResult with success probability and figure of merit.
        """
        pass

    @abstractmethod
    def coherent(self, n_bar: float) -> ProtocolResult:
        """
        Evaluate the protocol for a coherent input in closed form.

        Args:
            n_bar: Mean photon number of the probe pulse.

        Returns:
            ProtocolResult with success probability and figure of merit.
        """
        pass

    @abstractmethod
    def success_probability(self, n_bar: float) -> float:
        """Heralding probability for a coherent input."""
        pass

    @abstractmethod
    def sample_clicks(
        self, rng: np.random.Generator, count: int, n_bar: float
    ) -> FloatArray:
        """
        Draw click positions s in [0, n_bar] from the click density.

        Args:
            rng: Random generator.
            count: Number of positions to draw.
            n_bar: Mean photon number.

        Returns:
            Array of click positions.
        """
        pass

    @abstractmethod
    def conditional_values(
        self, s: FloatArray, n_bar: float, with_t2: bool = False
    ) -> dict[str, FloatArray]:
        """
        Figures of merit conditioned on a click at each position.

        Args:
            s: Click positions.
            n_bar: Mean photon number.
            with_t2: Include the qubit Gaussian decoherence.

        Returns:
            Mapping from quantity name to per-click values.
        """
        pass

    def check_n_bar(self, n_bar: float) -> None:
        if n_bar < 0 or not math.isfinite(n_bar):
            raise DomainError(f"n_bar must be a finite non-negative number, got {n_bar!r}")

    def time_to_end(self, s: FloatArray, n_bar: float) -> FloatArray:
        """Time between a click at position s and the end of the pulse."""
        alpha2 = flux_for_n_bar(n_bar, self.params.pulse_duration)
        if alpha2 == 0:
            return np.zeros_like(s)
        return np.clip(n_bar - s, 0.0, None) / alpha2

    def coherence_time(self, with_t2: bool) -> Optional[float]:
        """T2 to apply, or None when decoherence is switched off."""
        if not with_t2:
            return None
        if self.params.t2 is None:
            raise DomainError("with_t2 requested but the parameters carry no t2")
        return self.params.t2
