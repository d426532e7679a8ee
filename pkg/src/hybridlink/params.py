"""
Parameter validation and unit handling.

Validates hybrid parameter sets, enforces the resonance condition between the
dressed splitting and the qubit splitting, and converts physical units (MHz, ns)
into the dimensionless units used everywhere else (rates in gamma, times in 1/gamma).
"""

import logging
import math
from collections.abc import Mapping
from typing import Any, Optional

from hybridlink.config import settings
from hybridlink.errors import (
    DomainError,
    NegativeRateError,
    RateSumMismatchError,
    ResonanceInfeasibleError,
)
from hybridlink.models.schemas import DressedBasis, Geometry, HybridParams
from hybridlink.presets.loader import load_preset

logger = logging.getLogger(__name__)

RATE_FIELDS = ("gamma_1d", "gamma_c", "gamma_i")
RATE_SUM_TOLERANCE = 1e-12


def resonance_delta0(v_dd: float, omega_q: float) -> float:
    """
    Bare detuning that makes the dressed splitting equal to omega_q.

    Args:
        v_dd: Dipole-dipole coupling V.
        omega_q: Qubit splitting.

    Returns:
        delta_0 = sqrt(omega_q^2 - 4 V^2).

    Raises:
        ResonanceInfeasibleError: If 2V > omega_q.
    """
    if 2 * v_dd > omega_q:
        raise ResonanceInfeasibleError(
            f"2V = {2 * v_dd:g} exceeds omega_q = {omega_q:g}; resonance cannot be reached"
        )
    return math.sqrt((omega_q - 2 * v_dd) * (omega_q + 2 * v_dd))


def validate(p: HybridParams) -> HybridParams:
    """
    Validate a parameter set and apply the resonance condition.

    Args:
        p: Parameter set to check.

    Returns:
        The same parameters, with delta_0 resolved when resonance is enabled.

    Raises:
        NegativeRateError: If any decay rate is negative.
        RateSumMismatchError: If the decay rates do not add up to 1.
        ResonanceInfeasibleError: If resonance is requested with 2V > omega_q.
        DomainError: If the pulse duration or T2 is not positive.
    """
    for name in RATE_FIELDS:
        value = getattr(p, name)
        if value < 0:
            raise NegativeRateError(f"{name} = {value:g} is negative")

    total = p.gamma_total
    if abs(total - 1.0) > RATE_SUM_TOLERANCE:
        raise RateSumMismatchError(
            f"gamma_1d + gamma_c + gamma_i = {total!r}, expected 1 (rates are in units of gamma)"
        )

    if p.pulse_duration <= 0:
        raise DomainError(f"pulse_duration must be positive, got {p.pulse_duration:g}")
    if p.t2 is not None and p.t2 <= 0:
        raise DomainError(f"t2 must be positive, got {p.t2:g}")

    if p.resonance:
        delta_0 = resonance_delta0(p.v_dd, p.omega_q)
        if delta_0 != p.delta_0:
            p = p.model_copy(update={"delta_0": delta_0})

    return p


def optimal_detuning(p: HybridParams, d: DressedBasis) -> float:
    """Probe detuning Delta = -omega_q/2 + G that maximizes the Raman rate."""
    return -0.5 * p.omega_q + d.g_eff


# --- units -------------------------------------------------------------------


def mhz_to_gamma(frequency_mhz: float) -> float:
    """Convert an ordinary frequency f (omega = 2 pi f) in MHz to units of gamma."""
    return frequency_mhz / settings.linewidth_mhz


def gamma_to_mhz(value: float) -> float:
    return value * settings.linewidth_mhz


def ns_to_gamma(time_ns: float) -> float:
    """Convert a time in ns to units of 1/gamma."""
    return 2 * math.pi * settings.linewidth_mhz * 1e6 * time_ns * 1e-9


def gamma_to_ns(value: float) -> float:
    return value / (2 * math.pi * settings.linewidth_mhz * 1e-3)


def flux_for_n_bar(n_bar: float, pulse_duration: float) -> float:
    """
    Photon flux alpha^2 that delivers n_bar photons in one pulse.

    Raises:
        DomainError: If the pulse duration is not positive or n_bar is negative.
    """
    if pulse_duration <= 0:
        raise DomainError(f"pulse_duration must be positive, got {pulse_duration:g}")
    if n_bar < 0:
        raise DomainError(f"n_bar must be non-negative, got {n_bar:g}")
    return n_bar / pulse_duration


# --- construction ------------------------------------------------------------


def _target_key(key: str) -> str:
    if key == "x":
        return "v_dd"
    for suffix in ("_mhz", "_ns"):
        if key.endswith(suffix):
            return key.removesuffix(suffix)
    return key


def resolve_param_mapping(raw: Mapping[str, Any]) -> dict[str, Any]:
    """
    Convert a raw parameter mapping to HybridParams keyword arguments.

    Keys ending in ``_mhz`` are frequencies in MHz and keys ending in ``_ns`` are
    times in ns. The key ``x`` sets V as a fraction of omega_q.

    Args:
        raw: Mapping read from a preset, config file or command line.

    Returns:
        Dictionary of keyword arguments in dimensionless units.
    """
    resolved: dict[str, Any] = {}
    for key, value in raw.items():
        if key == "x":
            continue
        if key.endswith("_mhz"):
            resolved[key.removesuffix("_mhz")] = mhz_to_gamma(float(value))
        elif key.endswith("_ns"):
            resolved[key.removesuffix("_ns")] = ns_to_gamma(float(value))
        else:
            resolved[key] = value

    if "x" in raw:
        omega_q = float(resolved.get("omega_q", settings.omega_q_default))
        resolved["v_dd"] = float(raw["x"]) * omega_q
    return resolved


def merge_param_mappings(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Overlay overrides on base, dropping base keys that address the same parameter."""
    targets = {_target_key(k) for k in overrides}
    merged = {k: v for k, v in base.items() if _target_key(k) not in targets}
    merged.update(overrides)
    return merged


def build_params(raw: Mapping[str, Any]) -> HybridParams:
    """Build and validate a parameter set from a raw mapping."""
    return validate(HybridParams(**resolve_param_mapping(raw)))


def working_point(**overrides: Any) -> HybridParams:
    """
    Reference working point, optionally with some parameters replaced.

    Args:
        **overrides: Raw parameter entries (same keys as accepted by
            resolve_param_mapping).

    Returns:
        Validated parameter set.
    """
    base = load_preset("working_point")["params"]
    return build_params(merge_param_mappings(base, overrides))


def from_ratios(
    x: float,
    y: float,
    gamma_1d: float = 0.1,
    gamma_c: float = 0.45,
    gamma_i: Optional[float] = None,
    **extra: Any,
) -> HybridParams:
    """
    Parameter set from V/omega_q and the differential coupling (g_c1 - g_c2)/gamma.

    The couplings are split symmetrically, g_c1 = y/2 and g_c2 = -y/2.
    """
    if gamma_i is None:
        gamma_i = 1.0 - gamma_1d - gamma_c
    raw: dict[str, Any] = {
        "gamma_1d": gamma_1d,
        "gamma_c": gamma_c,
        "gamma_i": gamma_i,
        "g_c1": 0.5 * y,
        "g_c2": -0.5 * y,
        "x": x,
    }
    raw.update(extra)
    return build_params(raw)


def default_geometry(**overrides: Any) -> Geometry:
    """Island / waveguide geometry of the working point with optional overrides."""
    base = dict(load_preset("working_point")["geometry"])
    base.update(overrides)
    return Geometry(**base)
