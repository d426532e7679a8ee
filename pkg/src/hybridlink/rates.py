"""
Scattering probabilities per incident photon.

Provides the closed-form Raman, outside-Raman, inverse-Raman and dephasing
probabilities at the optimal working point, their general forms in terms of
inverted Hamiltonian elements, and the single-molecule readout amplitudes.
"""

import logging
import math
from typing import NamedTuple, Optional

from hybridlink.config import settings
from hybridlink.dressed import build_dressed
from hybridlink.errors import DomainError, ResonanceInfeasibleError
from hybridlink.models.schemas import (
    DephasingModel,
    DressedBasis,
    ElementProducts,
    HybridParams,
    InverseElements,
    QubitState,
    RateSet,
    ScatterCoeff,
)
from hybridlink.nonhermitian import element_products_closed, inverse_elements
from hybridlink.params import validate

logger = logging.getLogger(__name__)

RESONANCE_TOLERANCE = 1e-9
ANCHOR_GAP = 0.15


class DephasingAnchor(NamedTuple):
    """Printed and back-solved dephasing probabilities."""

    printed: float
    effective: float
    relative_gap: float

    @property
    def consistent(self) -> bool:
        return self.relative_gap <= ANCHOR_GAP


def _resonant(p: HybridParams) -> HybridParams:
    p = validate(p)
    mismatch = abs(4 * p.v_dd**2 + p.delta_0**2 - p.omega_q**2)
    if mismatch > RESONANCE_TOLERANCE * p.omega_q**2:
        raise ResonanceInfeasibleError(
            "closed-form rates need 2V_cal = omega_q; enable resonance or adjust delta_0"
        )
    return p


def _raman_lineshape(d: DressedBasis) -> float:
    """4G^2 / (Gs^2 Ga^2 / 4 + 4G^2), the Raman factor at the optimal detuning."""
    g2 = d.g_eff**2
    denom = 0.25 * (d.gamma_s * d.gamma_a) ** 2 + 4 * g2
    return 4 * g2 / denom if denom > 0 else 0.0


def light_amplitudes(p: HybridParams, d: DressedBasis) -> tuple[float, float]:
    """
    Squared light-coupling amplitudes (a^2, b^2) of the two dressed transitions.

    a^2 drives |g> -> |S>, b^2 drives |g> -> |A>. Both are normalized to the
    guided-mode decay rate for equal molecular light couplings.
    """
    gbar2 = 0.5 * (p.g_m1**2 + p.g_m2**2)
    if gbar2 == 0:
        return 0.0, 0.0
    a2 = p.gamma_1d * (p.g_m1 * d.beta2p + p.g_m2 * d.beta1p) ** 2 / gbar2
    b2 = p.gamma_1d * (p.g_m1 * d.beta2 - p.g_m2 * d.beta1) ** 2 / gbar2
    return a2, b2


def decay_weights(p: HybridParams, d: DressedBasis) -> tuple[list[float], list[float]]:
    """
    Jump amplitudes out of |A,+> and |S,-> for the three decay families.

    Families: collective plus guided decay, intrinsic decay of molecule 1,
    intrinsic decay of molecule 2.

    Returns:
        (antisymmetric amplitudes, symmetric amplitudes).
    """
    shared = math.sqrt(p.gamma_1d + p.gamma_c)
    own = math.sqrt(p.gamma_i)
    antisym = [shared * (d.beta2 - d.beta1), own * d.beta2, -own * d.beta1]
    sym = [shared * (d.beta2p + d.beta1p), own * d.beta2p, own * d.beta1p]
    return antisym, sym


# --- closed forms ------------------------------------------------------------


def raman_probability(p: HybridParams) -> float:
    """
    Raman scattering probability into the waveguide at the optimal point.

    Raises:
        ResonanceInfeasibleError: If the resonance condition does not hold.
    """
    p = _resonant(p)
    d = build_dressed(p)
    return p.gamma_1d**2 * (p.delta_0 / p.omega_q) ** 2 * _raman_lineshape(d)


def raman_probability_normalized(x: float, y: float, gamma_c: float) -> float:
    """
    Raman probability in units of gamma_1D^2 as a function of x = V/omega_q and y.

    Args:
        x: Dipole coupling over qubit splitting, 0 <= x < 1/2.
        y: Differential qubit coupling (g_c1 - g_c2)/gamma.
        gamma_c: Collective decay in units of gamma.

    Raises:
        DomainError: If x is outside [0, 1/2).
    """
    if not 0 <= x < 0.5:
        raise DomainError(f"x = V/omega_q must lie in [0, 0.5), got {x:g}")
    xy2 = 16 * x**2 * y**2
    return (1 - 4 * x**2) * xy2 / (xy2 + (1 - 4 * gamma_c**2 * x**2) ** 2) if xy2 > 0 else 0.0


def raman_outside(p: HybridParams) -> float:
    """Raman scattering probability outside the waveguide at the optimal point."""
    p = _resonant(p)
    d = build_dressed(p)
    cos2 = (p.delta_0 / p.omega_q) ** 2
    weight = p.gamma_c * cos2 + p.gamma_i * (1 + 2 * p.x)
    return p.gamma_1d * weight * 0.5 * _raman_lineshape(d)


def inverse_raman(p: HybridParams) -> float:
    """Inverse Raman probability, suppressed by 1/omega_q^2."""
    p = _resonant(p)
    d = build_dressed(p)
    cos2 = (p.delta_0 / p.omega_q) ** 2
    weight = (
        p.gamma_1d**2 * cos2 + p.gamma_1d * p.gamma_c * cos2 + p.gamma_1d * p.gamma_i * (1 - 2 * p.x)
    )
    g, g1 = d.g_eff, d.g1_eff
    # G^2 (1 + Gas G1 / 4G^2 - Gs / 2G), regular at G = 0
    amplitude = g**2 + 0.25 * d.gamma_as * g1 - 0.5 * d.gamma_s * g
    return weight * (amplitude / p.omega_q) ** 2 / (d.gamma_s**2 + 4 * g**2)


def _dephasing_printed(p: HybridParams, d: DressedBasis) -> float:
    g = d.g_eff
    gs, ga = d.gamma_s, d.gamma_a
    weight = p.gamma_1d * (
        p.gamma_i * (1 + 2 * p.x) + (p.gamma_1d + p.gamma_c) * (1 + 2 * p.x) ** 2
    )
    numerator = 64 * g**4 - 16 * ga * g**2 * (4 * g - ga) + 4 * g**2 - 8 * gs**2 * ga * g
    denominator = (4 * g**2 + gs**2) * (0.25 * gs**4 + g**2)
    value = weight * numerator / denominator
    if value < 0:
        logger.warning(f"Printed dephasing expression is negative ({value:.4g}); using 0")
        return 0.0
    return value


def dephasing_anchor(p: HybridParams) -> DephasingAnchor:
    """
    Compare the printed dephasing probability with the anchor-implied value.

    The effective value is back-solved from the lowest-order Bell fidelity
    F = 1 - (n_bar/2)(P_R + P_RO + P_D/4) at (settings.anchor_n_bar,
    settings.anchor_fidelity).
    """
    p = _resonant(p)
    d = build_dressed(p)
    printed = _dephasing_printed(p, d)
    p_a = raman_probability(p) + raman_outside(p)
    effective = 4 * (2 * (1 - settings.anchor_fidelity) / settings.anchor_n_bar - p_a)
    if effective < 0:
        logger.warning(
            f"Fidelity anchor implies negative dephasing ({effective:.4g}); clamping to 0"
        )
        effective = 0.0
    scale = max(abs(effective), abs(printed), 1e-300)
    return DephasingAnchor(printed, effective, abs(printed - effective) / scale)


def dephasing_probability(p: HybridParams, model: Optional[DephasingModel] = None) -> float:
    """
    Light-induced dephasing probability.

    Args:
        p: Parameters at resonance.
        model: PRINTED evaluates the closed expression, EFFECTIVE back-solves it
            from the fidelity anchor. Defaults to settings.dephasing_model.
    """
    model = DephasingModel(settings.dephasing_model) if model is None else model
    if model is DephasingModel.EFFECTIVE:
        return dephasing_anchor(p).effective
    p = _resonant(p)
    return _dephasing_printed(p, build_dressed(p))


# --- general forms -----------------------------------------------------------


def raman_waveguide_share(p: HybridParams, d: DressedBasis, products: ElementProducts) -> float:
    """Raman probability into the waveguide from an element product."""
    a2, _ = light_amplitudes(p, d)
    return p.gamma_1d * (d.beta2 - d.beta1) ** 2 * a2 * products.p23_1


def general_rates(p: HybridParams, d: DressedBasis, inv: InverseElements) -> RateSet:
    """
    Rates from the inverted Hamiltonian elements (effective master equation).

    Args:
        p: Validated parameters.
        d: Dressed basis of p.
        inv: Inverse elements at the probe detuning of interest.

    Returns:
        RateSet whose P_R is the waveguide share of the Raman rate and whose
        P_RO is the remainder.
    """
    a2, b2 = light_amplitudes(p, d)
    antisym, sym = decay_weights(p, d)
    out_a = sum(c**2 for c in antisym)
    out_s = sum(c**2 for c in sym)

    p_rs = out_a * a2 * abs(inv.h1_32) ** 2
    p_r = p.gamma_1d * (d.beta2 - d.beta1) ** 2 * a2 * abs(inv.h1_32) ** 2
    p_ir = out_s * b2 * abs(inv.h2_23) ** 2
    p_d = out_s * a2 * abs(inv.h1_22 - inv.h2_ss) ** 2
    shift = 2 * a2 * inv.h1_22.real + 2 * b2 * inv.h2_33.real

    return RateSet(
        p_r=p_r,
        p_ro=max(p_rs - p_r, 0.0),
        p_ir=p_ir,
        p_d=p_d,
        p_rs=p_rs,
        omega_14=p.omega_q + shift,
        light_shift=shift,
    )


def compute_rates(p: HybridParams, model: Optional[DephasingModel] = None) -> RateSet:
    """
    Closed-form rate set at the optimal working point.

    P_R, P_RO and P_IR are the closed forms, P_D follows the dephasing model,
    P_RS uses the general Raman structure with the closed p23 product, and the
    frequency shift uses the numerically inverted elements.
    """
    p = _resonant(p)
    d = build_dressed(p)
    model = DephasingModel(settings.dephasing_model) if model is None else model

    closed = element_products_closed(p, d)
    a2, _ = light_amplitudes(p, d)
    antisym, _ = decay_weights(p, d)
    p_rs = sum(c**2 for c in antisym) * a2 * closed.p23_1

    inv = inverse_elements(p, d)
    shift = general_rates(p, d, inv).light_shift

    rates = RateSet(
        p_r=raman_probability(p),
        p_ro=raman_outside(p),
        p_ir=inverse_raman(p),
        p_d=dephasing_probability(p, model),
        p_rs=p_rs,
        omega_14=p.omega_q + shift,
        light_shift=shift,
    )
    logger.debug(f"Rates ({model.value}): {rates.model_dump()}")
    return rates


# --- single molecule readout -------------------------------------------------


def single_molecule_zeta(p: HybridParams, state: QubitState = QubitState.DOWN) -> ScatterCoeff:
    """
    Reflection amplitudes of one molecule coupled to the qubit.

    The probe sits on the line of ``state`` (Delta = +g_c/2 for down, -g_c/2 for
    up) unless p.delta is set.
    """
    gamma = p.gamma_total
    g_c = p.g_c1
    if p.delta is not None:
        detuning = p.delta
    else:
        detuning = 0.5 * g_c if state is QubitState.DOWN else -0.5 * g_c
    half_1d = 0.5 * p.gamma_1d
    return ScatterCoeff(
        zeta_up=half_1d / (detuning - 0.5j * gamma + 0.5 * g_c),
        zeta_down=half_1d / (detuning - 0.5j * gamma - 0.5 * g_c),
    )


def readout_contrast(
    p: HybridParams,
    n_photons: int,
    probe_state: QubitState = QubitState.DOWN,
) -> tuple[float, float]:
    """
    Probability of at least one reflected photon for each qubit state.

    Returns:
        (p_click_up, p_click_down).
    """
    if n_photons < 0:
        raise DomainError(f"n_photons must be non-negative, got {n_photons}")
    zeta = single_molecule_zeta(p, probe_state)
    return tuple(  # type: ignore[return-value]
        _at_least_one(zeta.reflection(s), n_photons) for s in (QubitState.UP, QubitState.DOWN)
    )


def _at_least_one(reflection: float, n_photons: int) -> float:
    """1 - (1 - R)^n, exact for R = 1 (a lossless molecule reflects every photon)."""
    if n_photons == 0:
        return 0.0
    if reflection >= 1.0:
        return 1.0
    return -math.expm1(n_photons * math.log1p(-reflection))


def photon_budget(p: HybridParams) -> float:
    """Photons needed to see one reflection on resonance, (gamma / gamma_1D)^2."""
    if p.gamma_1d <= 0:
        raise DomainError("photon budget is undefined for gamma_1d = 0")
    return (p.gamma_total / p.gamma_1d) ** 2
