"""
Heralded Bell-state generation between two remote charge qubits.

A click behind the beam splitter projects the qubits onto a Bell state. For a
coherent probe the fidelity is reduced by photons scattered before and after
the heralding click, and by qubit decoherence over the remainder of the pulse.
"""

import logging
import math
from collections.abc import Callable
from typing import Optional

import numpy as np
from scipy.integrate import quad

from hybridlink.evolution import coherence_factor, superposition_coherence
from hybridlink.models.schemas import (
    DephasingModel,
    HybridParams,
    ProtocolKind,
    ProtocolResult,
    RateSet,
)
from hybridlink.params import flux_for_n_bar
from hybridlink.protocols.base import (
    BaseProtocol,
    FloatArray,
    decay_integral,
    sample_truncated_exponential,
)

logger = logging.getLogger(__name__)


class BellProtocol(BaseProtocol):
    """Bell-state generation heralded by a single Stokes photon."""

    kind = ProtocolKind.BELL

    def single_photon(self) -> ProtocolResult:
        return ProtocolResult(
            protocol=self.kind,
            success_prob=self.params.eta * self.rates.p_r,
            fidelity=1.0,
        )

    def success_probability(self, n_bar: float) -> float:
        self.check_n_bar(n_bar)
        return self.params.eta * self.rates.p_r * decay_integral(0.5 * self.p_a, n_bar)

    def fidelity(self, n_bar: float) -> float:
        """Bell fidelity for a coherent input without qubit decoherence."""
        self.check_n_bar(n_bar)
        if n_bar == 0:
            return 1.0
        a, p_d = self.p_a, self.rates.p_d
        weight = decay_integral(0.5 * a, n_bar)
        overlap = math.exp(-0.5 * p_d * n_bar) * decay_integral(0.5 * (a - p_d), n_bar)
        return 0.5 * math.exp(-0.5 * a * n_bar) * (1 + overlap / weight)

    def fidelity_first_order(self, n_bar: float) -> float:
        """Lowest-order expansion 1 - (n_bar/2)(P_R + P_RO + P_D/4)."""
        return 1 - 0.5 * n_bar * (self.p_a + 0.25 * self.rates.p_d)

    def _click_average(self, n_bar: float, integrand: Callable[[float], float]) -> float:
        a = self.p_a
        value, _ = quad(lambda s: math.exp(-0.5 * a * s) * integrand(s), 0.0, n_bar, limit=200)
        return value / decay_integral(0.5 * a, n_bar)

    def coherent(self, n_bar: float, with_t2: bool = False) -> ProtocolResult:
        """
        Bell fidelity and success probability for a coherent input.

        Args:
            n_bar: Mean photon number.
            with_t2: Include the Gaussian qubit decoherence over the time between
                click and pulse end. Adds the exact and lowest-order penalties.
        """
        success = self.success_probability(n_bar)
        fidelity = self.fidelity(n_bar)
        result = ProtocolResult(
            protocol=self.kind,
            n_bar=n_bar,
            success_prob=success,
            fidelity=fidelity,
            fidelity_first_order=self.fidelity_first_order(n_bar),
        )
        t2 = self.coherence_time(with_t2)
        if t2 is None or n_bar == 0:
            return result

        alpha2 = flux_for_n_bar(n_bar, self.params.pulse_duration)
        a, p_d = self.p_a, self.rates.p_d

        def fidelity_at(s: float) -> float:
            tau = (n_bar - s) / alpha2
            both = coherence_factor(p_d, 0.5 * alpha2, tau, t2) ** 2
            return 0.5 * math.exp(-0.5 * a * n_bar) * (1 + both)

        def penalty_at(s: float) -> float:
            return ((n_bar - s) / alpha2 / t2) ** 2

        with_decoherence = self._click_average(n_bar, fidelity_at)
        first_order = self._click_average(n_bar, penalty_at)
        logger.debug(
            f"T2 penalty at n_bar={n_bar:g}: exact {fidelity - with_decoherence:.3e}, "
            f"first order {first_order:.3e}"
        )
        return result.model_copy(
            update={
                "fidelity": with_decoherence,
                "t2_penalty": fidelity - with_decoherence,
                "t2_penalty_first_order": first_order,
            }
        )

    def sample_clicks(self, rng: np.random.Generator, count: int, n_bar: float) -> FloatArray:
        return sample_truncated_exponential(rng.random(count), 0.5 * self.p_a, n_bar)

    def post_click_rates(self) -> RateSet:
        """
        Rates acting on each qubit between the click and the end of the pulse.

        A further Raman event spoils the herald and is counted once in the
        prefactor exp(-A n_bar / 2), so only elastic dephasing remains here.
        """
        return self.rates.model_copy(update={"p_rs": 0.0, "p_ir": 0.0})

    def conditional_values(
        self, s: FloatArray, n_bar: float, with_t2: bool = False
    ) -> dict[str, FloatArray]:
        # Each hybrid sees half of the probe after the beam splitter
        alpha2 = 0.5 * flux_for_n_bar(n_bar, self.params.pulse_duration)
        tau = self.time_to_end(s, n_bar)
        rates = self.post_click_rates()
        prefactor = 0.5 * math.exp(-0.5 * self.p_a * n_bar)
        each = superposition_coherence(rates, alpha2, tau)
        values = {"fidelity": prefactor * (1 + each**2)}

        t2 = self.coherence_time(with_t2)
        if t2 is not None:
            each_t2 = superposition_coherence(rates, alpha2, tau, t2)
            decohered = prefactor * (1 + each_t2**2)
            values["t2_penalty"] = values["fidelity"] - decohered
            values["t2_penalty_first_order"] = (tau / t2) ** 2
            values["fidelity"] = decohered
        return values


def bell_single_photon(
    p: HybridParams,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
) -> ProtocolResult:
    """Bell fidelity and success probability for a single-photon input."""
    return BellProtocol(p, rates, model).single_photon()


def bell_coherent(
    p: HybridParams,
    n_bar: float,
    with_t2: bool = False,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
) -> ProtocolResult:
    """Bell fidelity and success probability for a coherent input."""
    return BellProtocol(p, rates, model).coherent(n_bar, with_t2)
