"""
Dressed basis of the coupled molecule pair.

The dipole-dipole coupling V mixes the two singly excited molecular states into
the dressed states |S> and |A>, split by 2V_cal = sqrt(4V^2 + delta_0^2). This
module computes the hybridization coefficients and the dressed couplings and
decay rates that enter the non-Hermitian Hamiltonians.
"""

import math

from hybridlink.errors import DegenerateSplittingError
from hybridlink.models.schemas import DressedBasis, HybridParams


def build_dressed(p: HybridParams) -> DressedBasis:
    """
    Build the dressed basis for a parameter set.

    Args:
        p: Validated parameters.

    Returns:
        DressedBasis with beta coefficients, dressed couplings and decays.

    Raises:
        DegenerateSplittingError: If V = 0 and delta_0 = 0.
    """
    splitting = math.hypot(2 * p.v_dd, p.delta_0)
    if splitting == 0.0:
        raise DegenerateSplittingError("V = 0 and delta_0 = 0 leave the dressed states degenerate")

    cos_mix = p.delta_0 / splitting
    overlap = p.v_dd / splitting

    beta1 = math.sqrt(0.5 * (1 + cos_mix))
    beta2 = math.sqrt(0.5 * (1 - cos_mix))

    g_sum = p.g_c1 + p.g_c2
    g_diff = p.g_c1 - p.g_c2
    gamma = p.gamma_total

    return DressedBasis(
        beta1=beta1,
        beta2=beta2,
        beta1p=beta2,
        beta2p=beta1,
        splitting=splitting,
        g_eff=g_diff * overlap,
        g1_eff=0.5 * (g_sum + cos_mix * g_diff),
        g2_eff=0.5 * (g_sum - cos_mix * g_diff),
        gamma_s=gamma + 2 * p.gamma_c * overlap,
        gamma_a=gamma - 2 * p.gamma_c * overlap,
        gamma_as=p.gamma_c * cos_mix,
    )


def dressed_identities(p: HybridParams, d: DressedBasis) -> dict[str, float]:
    """
    Residuals of the identities the hybridization coefficients must satisfy.

    Returns:
        Mapping from identity name to its absolute residual.
    """
    return {
        "beta1p_eq_beta2": abs(d.beta1p - d.beta2),
        "beta2p_eq_beta1": abs(d.beta2p - d.beta1),
        "normalization": abs(d.beta1**2 + d.beta2**2 - 1.0),
        "overlap": abs(d.beta1 * d.beta2 - p.v_dd / d.splitting),
    }
