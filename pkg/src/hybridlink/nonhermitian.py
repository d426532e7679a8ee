"""
Non-Hermitian Hamiltonians of the two Raman pathways.

Builds the 4x4 complex Hamiltonians of the excited manifold in the dressed basis
{|S,+>, |S,->, |A,+>, |A,->}, inverts them, and extracts the element products
that set the scattering rates. Closed forms for the products are provided next
to the numerical ones so the two can be compared.
"""

import logging
from typing import Optional

import numpy as np

from hybridlink.config import settings
from hybridlink.errors import SingularMatrixError
from hybridlink.models.schemas import (
    ComplexMatrix4,
    DressedBasis,
    ElementProducts,
    HybridParams,
    InverseElements,
    ScatteringPath,
)

logger = logging.getLogger(__name__)

# Basis indices
S_PLUS, S_MINUS, A_PLUS, A_MINUS = 0, 1, 2, 3


def default_offsets(
    p: HybridParams,
    d: DressedBasis,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> tuple[float, float]:
    """
    Resolve the detuning offsets (eps1, eps2) around the optimal point.

    Delta = -omega_q/2 + eps1 and V_cal = omega_q/2 + eps2. By default eps1 = G
    (or the probe detuning when one is set) and eps2 = V_cal - omega_q/2, which
    vanishes on resonance.
    """
    if eps1 is None:
        eps1 = d.g_eff if p.delta is None else p.delta + 0.5 * p.omega_q
    if eps2 is None:
        eps2 = d.half_splitting - 0.5 * p.omega_q
    return eps1, eps2


def build_hnh(
    p: HybridParams,
    d: DressedBasis,
    which: ScatteringPath,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> ComplexMatrix4:
    """
    Build the non-Hermitian Hamiltonian of one scattering pathway.

    Args:
        p: Validated parameters.
        d: Dressed basis of p.
        which: Pathway (path-1 starts in |g,->, path-2 in |g,+>).
        eps1: Offset of the probe detuning from -omega_q/2.
        eps2: Offset of V_cal from omega_q/2.

    Returns:
        Complex 4x4 matrix in the basis {|S,+>, |S,->, |A,+>, |A,->}.
    """
    eps1, eps2 = default_offsets(p, d, eps1, eps2)
    wq = p.omega_q
    delta = -0.5 * wq + eps1
    half = 0.5 * wq + eps2

    if which is ScatteringPath.PATH1:
        energies = [half + delta + wq, half + delta, -half + delta + wq, -half + delta]
    else:
        energies = [half + delta, half + delta - wq, -half + delta, -half + delta - wq]
    decays = [d.gamma_s, d.gamma_s, d.gamma_a, d.gamma_a]

    m = np.zeros((4, 4), dtype=np.complex128)
    for k in range(4):
        m[k, k] = energies[k] - 0.5j * decays[k]

    cross_decay = -0.5j * d.gamma_as
    couplings = {
        (S_PLUS, S_MINUS): 0.5 * d.g1_eff,
        (A_PLUS, A_MINUS): 0.5 * d.g2_eff,
        (S_PLUS, A_PLUS): cross_decay,
        (S_MINUS, A_MINUS): cross_decay,
        (S_PLUS, A_MINUS): d.g_eff,
        (S_MINUS, A_PLUS): d.g_eff,
    }
    for (i, j), value in couplings.items():
        m[i, j] = value
        m[j, i] = value
    return m


def invert4(m: ComplexMatrix4) -> ComplexMatrix4:
    """
    Invert a 4x4 complex matrix.

    Args:
        m: Matrix to invert.

    Returns:
        The inverse of m.

    Raises:
        SingularMatrixError: If |det m| <= threshold * ||m||_inf^4.
    """
    norm = float(np.linalg.norm(m, ord=np.inf))
    det = complex(np.linalg.det(m))
    if not np.isfinite(norm) or abs(det) <= settings.singular_threshold * norm**4:
        raise SingularMatrixError(f"matrix is singular (|det| = {abs(det):.3e}, norm = {norm:.3e})")
    return np.linalg.inv(m)


def inverse_elements(
    p: HybridParams,
    d: DressedBasis,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> InverseElements:
    """Invert both pathway Hamiltonians and collect the elements the rates use."""
    h1 = invert4(build_hnh(p, d, ScatteringPath.PATH1, eps1, eps2))
    h2 = invert4(build_hnh(p, d, ScatteringPath.PATH2, eps1, eps2))
    return InverseElements(
        h1_22=complex(h1[S_MINUS, S_MINUS]),
        h1_32=complex(h1[A_PLUS, S_MINUS]),
        h2_23=complex(h2[S_MINUS, A_PLUS]),
        h2_33=complex(h2[A_PLUS, A_PLUS]),
        h2_ss=complex(h2[S_PLUS, S_PLUS]),
    )


def element_products_numeric(
    p: HybridParams,
    d: DressedBasis,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> ElementProducts:
    """Element products from the numerically inverted Hamiltonians."""
    return inverse_elements(p, d, eps1, eps2).products()


def element_products_closed(
    p: HybridParams,
    d: DressedBasis,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> ElementProducts:
    """
    Element products from their closed-form expressions.

    p23_1 is exact for the central |S,->/|A,+> block. The remaining forms keep only
    the leading order in 1/omega_q and can deviate from the numerical inversion.
    """
    eps1, eps2 = default_offsets(p, d, eps1, eps2)
    g, g1 = d.g_eff, d.g1_eff
    gs, ga, gas = d.gamma_s, d.gamma_a, d.gamma_as
    wq = p.omega_q
    e = eps1 + eps2

    denom = (4 * g**2 + gs * ga + 4 * (eps2**2 - eps1**2)) ** 2 + 4 * (
        gs * (eps1 - eps2) + ga * (eps1 + eps2)
    ) ** 2
    k = 8 * gs * g - 4 * gas * g1 - 16 * g * e
    lorentz = gs**2 + 4 * e**2

    return ElementProducts(
        p23_1=16 * g**2 / denom,
        p22_1=16 * (ga + 2 * (eps2 - eps1)) ** 2 / denom,
        p32_2=((0.25 * e * k) ** 2 + (0.125 * gs * k) ** 2) / (wq**4 * lorentz**2),
        p33_2=((2 * e * (gs - 2 * e)) ** 2 + (gs * (gs - 2 * e)) ** 2) / (wq**2 * lorentz),
        p_ss_2=4 / lorentz,
    )


def compare_products(
    numeric: ElementProducts,
    closed: ElementProducts,
    tolerance: Optional[float] = None,
) -> dict[str, float]:
    """
    Relative deviation of the closed products from the numerical ones.

    Products outside the tolerance band are logged; the numerical value is
    the one used downstream.

    Args:
        numeric: Products from inversion.
        closed: Products from the closed forms.
        tolerance: Relative band, defaults to settings.oracle_tolerance.

    Returns:
        Mapping from product name to |closed - numeric| / |numeric|.
    """
    tolerance = settings.oracle_tolerance if tolerance is None else tolerance
    numeric_values = numeric.model_dump()
    closed_values = closed.model_dump()

    deviations: dict[str, float] = {}
    for name, value in numeric_values.items():
        scale = max(abs(value), np.finfo(float).tiny)
        deviations[name] = abs(closed_values[name] - value) / scale
        if deviations[name] > tolerance:
            logger.warning(
                f"Closed form of {name} deviates from inversion by {deviations[name]:.1%} "
                f"(closed {closed_values[name]:.6g}, numeric {value:.6g})"
            )
    return deviations
