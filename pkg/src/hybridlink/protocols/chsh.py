"""
CHSH violation between one charge qubit and a scattered photon.

The probe is split over the two arms of an interferometer. In the lower arm it
Raman scatters off a single hybrid, in the upper arm it is frequency shifted by
omega_q and picks up a phase. A click at D+ or D- behind the second beam splitter
leaves the hybrid entangled with the detected photon, and the CHSH combination
is built from the joint photon and qubit outcomes.
"""

import logging
import math
from collections.abc import Sequence
from functools import lru_cache
from typing import Optional

import numpy as np

from hybridlink.evolution import superposition_coherence
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

PSI_A = math.pi / 4
PSI_A_PRIME = 3 * math.pi / 4
PHI_B = 0.0
PHI_B_PRIME = math.pi / 2

# (psi, phi, sign) in the combination E(a,b) - E(a,b') + E(a',b) + E(a',b')
CHSH_SETTINGS: tuple[tuple[float, float, int], ...] = (
    (PSI_A, PHI_B, 1),
    (PSI_A, PHI_B_PRIME, -1),
    (PSI_A_PRIME, PHI_B, 1),
    (PSI_A_PRIME, PHI_B_PRIME, 1),
)

TSIRELSON = 2 * math.sqrt(2)


def joint_probabilities(psi: float, phi: float, visibility: float = 1.0) -> dict[tuple[int, int], float]:
    """
    Joint photon and qubit outcome probabilities at the settings (psi, phi).

    Args:
        psi: Measurement angle of the qubit basis.
        phi: Interferometer phase applied to the photon.
        visibility: Correlation contrast of the heralded hybrid-photon state.

    Returns:
        Mapping from the (detector, qubit) outcome pair (+-1, +-1) to its probability.
    """
    c = visibility * math.sin(psi - phi)
    same = 0.25 * (1 + c)
    diff = 0.25 * (1 - c)
    return {(1, 1): same, (-1, -1): same, (1, -1): diff, (-1, 1): diff}


def correlator(probabilities: dict[tuple[int, int], float]) -> float:
    """Expectation of the product of the two outcomes."""
    return sum(a * b * prob for (a, b), prob in probabilities.items())


def chsh_combination(correlators: Sequence[float]) -> float:
    """Combine the four correlators in CHSH_SETTINGS order into S."""
    return sum(sign * e for (_, _, sign), e in zip(CHSH_SETTINGS, correlators, strict=True))


@lru_cache(maxsize=1)
def _note_correlator_normalization() -> None:
    logger.warning(
        "Per-click CHSH correlator carries the Raman amplitude sqrt(P_R) so that its "
        "click average reproduces the coherent-state S value"
    )


class ChshProtocol(BaseProtocol):
    """CHSH test between a single hybrid and the photon that heralds it."""

    kind = ProtocolKind.CHSH

    @property
    def chi2(self) -> float:
        """Weight of the Raman branch in the heralded state, P_R / (1 + P_R)."""
        return self.rates.p_r / (1 + self.rates.p_r)

    def single_photon(self) -> ProtocolResult:
        s_value = chsh_combination(
            [correlator(joint_probabilities(psi, phi)) for psi, phi, _ in CHSH_SETTINGS]
        )
        p_r = self.rates.p_r
        return ProtocolResult(
            protocol=self.kind,
            success_prob=2 * self.params.eta * p_r / (1 + p_r),
            s_parameter=s_value,
        )

    def success_probability(self, n_bar: float) -> float:
        self.check_n_bar(n_bar)
        chi2 = self.chi2
        q = 1 - chi2
        return self.params.eta * (
            n_bar * chi2 + self.rates.p_r * q * decay_integral(self.p_a * q, n_bar)
        )

    def s_value(self, n_bar: float) -> float:
        """CHSH S for a coherent input of mean photon number n_bar."""
        self.check_n_bar(n_bar)
        if n_bar == 0:
            return TSIRELSON
        a, p_d, p_r = self.p_a, self.rates.p_d, self.rates.p_r
        chi2 = self.chi2
        q = 1 - chi2
        weight = n_bar * chi2 + p_r * q * decay_integral(a * q, n_bar)
        if weight <= 0:
            return TSIRELSON
        envelope = (
            2
            * math.sqrt(chi2 * q * p_r)
            * math.exp(-0.5 * (a + p_d) * q * n_bar)
            * decay_integral(0.5 * (a - p_d) * q, n_bar)
        )
        return TSIRELSON * envelope / weight

    def coherent(self, n_bar: float) -> ProtocolResult:
        return ProtocolResult(
            protocol=self.kind,
            n_bar=n_bar,
            success_prob=self.success_probability(n_bar),
            s_parameter=self.s_value(n_bar),
        )

    def sample_clicks(self, rng: np.random.Generator, count: int, n_bar: float) -> FloatArray:
        # Mixture of a flat part (chi^2) and a decaying part (P_R (1 - chi^2) e^{-A q s})
        chi2 = self.chi2
        q = 1 - chi2
        rate = self.p_a * q
        flat = n_bar * chi2
        decaying = self.rates.p_r * q * decay_integral(rate, n_bar)
        pick_flat = rng.random(count) * (flat + decaying) < flat
        u = rng.random(count)
        return np.where(
            pick_flat,
            u * n_bar,
            sample_truncated_exponential(u, rate, n_bar),
        )

    def post_click_rates(self) -> RateSet:
        """
        Rates acting on the hybrid between the click and the end of the pulse.

        Raman events into and outside the waveguide both destroy the coherence;
        inverse Raman transfer is not part of the heralded dynamics.
        """
        return self.rates.model_copy(update={"p_rs": self.p_a, "p_ir": 0.0})

    def conditional_values(
        self, s: FloatArray, n_bar: float, with_t2: bool = False
    ) -> dict[str, FloatArray]:
        _note_correlator_normalization()
        p_r = self.rates.p_r
        chi2 = self.chi2
        q = 1 - chi2
        # The hybrid arm carries the fraction 1 - chi^2 of the flux
        alpha2 = q * flux_for_n_bar(n_bar, self.params.pulse_duration)
        tau = self.time_to_end(s, n_bar)
        coherence = superposition_coherence(
            self.post_click_rates(), alpha2, tau, self.coherence_time(with_t2)
        )
        raman = np.exp(-self.p_a * q * s)
        envelope = 2 * math.sqrt(chi2 * q * p_r) * raman * coherence / (chi2 + p_r * q * raman)
        correlators = [envelope * math.sin(psi - phi) for psi, phi, _ in CHSH_SETTINGS]
        return {"s_parameter": chsh_combination(correlators)}


def chsh_single_photon(
    p: HybridParams,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
) -> ProtocolResult:
    """CHSH S and success probability for a single-photon input."""
    return ChshProtocol(p, rates, model).single_photon()


def chsh_coherent(
    p: HybridParams,
    n_bar: float,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
) -> ProtocolResult:
    """CHSH S and success probability for a coherent input."""
    return ChshProtocol(p, rates, model).coherent(n_bar)
