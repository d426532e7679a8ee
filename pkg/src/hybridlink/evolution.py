"""
Ground-manifold dynamics of a driven hybrid.

Under a weak probe of photon flux alpha^2 the excited manifold can be
eliminated and the hybrid reduces to the two ground states |1> = |g,-> and
|4> = |g,+>. This module gives the closed-form solution of that effective
master equation and an independent numerical integration of it.
"""

import cmath
import logging
import math
from collections.abc import Sequence
from typing import Callable, Optional

import numpy as np
import numpy.typing as npt
from scipy.integrate import solve_ivp

from hybridlink.config import settings
from hybridlink.errors import DomainError, IntegrationFailureError
from hybridlink.models.schemas import (
    DressedBasis,
    GroundState,
    HybridParams,
    InverseElements,
    RateSet,
)
from hybridlink.nonhermitian import inverse_elements
from hybridlink.rates import decay_weights, light_amplitudes

logger = logging.getLogger(__name__)

Matrix2 = npt.NDArray[np.complex128]

SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
LOWER = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |4><1|
RAISE = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |1><4|
PROJ_1 = np.diag([1.0, 0.0]).astype(np.complex128)
PROJ_4 = np.diag([0.0, 1.0]).astype(np.complex128)


def coherence_factor(
    p_c: float,
    alpha2: float,
    tau: float,
    t2: Optional[float] = None,
) -> float:
    """
    Decay of the ground-state coherence over a time tau.

    exp(-P_c alpha^2 tau / 2), times the Gaussian qubit decay exp(-(tau/T2)^2)
    when a coherence time is given.
    """
    exponent = -0.5 * p_c * alpha2 * tau
    if t2 is not None:
        exponent -= (tau / t2) ** 2
    return math.exp(exponent)


def evolve_closed(
    rho0: GroundState,
    rates: RateSet,
    alpha2: float,
    t: float,
    t2: Optional[float] = None,
) -> GroundState:
    """
    Closed-form evolution of the ground-manifold density matrix.

    Args:
        rho0: Initial state.
        rates: Scattering probabilities per photon.
        alpha2: Photon flux.
        t: Evolution time.
        t2: Optional Gaussian coherence time of the qubit.

    Returns:
        State at time t, coherence in the frame rotating at omega_q.

    Raises:
        DomainError: If t or alpha2 is negative.
    """
    if t < 0 or alpha2 < 0:
        raise DomainError(f"time and flux must be non-negative (t={t:g}, alpha2={alpha2:g})")

    total = rates.p_rs + rates.p_ir
    k = total * alpha2 * t
    if total > 0 and k > 0:
        remain = math.exp(-k)
        moved = -math.expm1(-k)
        f_rs = rates.p_rs / total
        f_ir = rates.p_ir / total
        rho11 = rho0.rho11 * (f_ir + f_rs * remain) + rho0.rho44 * f_ir * moved
        rho44 = rho0.rho44 * (f_rs + f_ir * remain) + rho0.rho11 * f_rs * moved
    else:
        rho11, rho44 = rho0.rho11, rho0.rho44

    phase = cmath.exp(1j * rates.light_shift * alpha2 * t)
    rho14 = rho0.rho14 * phase * coherence_factor(rates.p_c, alpha2, t, t2)
    return GroundState(rho11=rho11, rho44=rho44, rho14=rho14)


def superposition_coherence(
    rates: RateSet,
    alpha2: float,
    tau: npt.ArrayLike,
    t2: Optional[float] = None,
) -> npt.NDArray[np.float64]:
    """
    Coherence 2|rho14| left in an equal superposition after each time in tau.

    Every entry is an evolve_closed run from GroundState.superposition().
    """
    start = GroundState.superposition()
    return np.array(
        [
            2.0 * abs(evolve_closed(start, rates, alpha2, float(t), t2).rho14)
            for t in np.atleast_1d(tau)
        ],
        dtype=float,
    )


def effective_operators(
    p: HybridParams,
    d: DressedBasis,
    alpha2: float,
    inv: InverseElements,
) -> tuple[Matrix2, list[Matrix2]]:
    """
    Effective Hamiltonian and jump operators on {|1>, |4>}.

    Each decay family contributes a Raman jump |4><1|, an inverse-Raman jump
    |1><4| and an elastic jump diagonal in the ground states.

    Returns:
        (hamiltonian, jump operators).
    """
    a2, b2 = light_amplitudes(p, d)
    a, b = math.sqrt(a2), math.sqrt(b2)
    antisym, sym = decay_weights(p, d)
    alpha = math.sqrt(alpha2)

    hamiltonian = alpha2 * np.diag([a2 * inv.h1_22.real, b2 * inv.h2_33.real]).astype(
        np.complex128
    )
    elastic = inv.h1_22 * PROJ_1 + inv.h2_ss * PROJ_4

    jumps: list[Matrix2] = []
    for c in antisym:
        jumps.append(alpha * c * a * inv.h1_32 * LOWER)
    for c in sym:
        jumps.append(alpha * c * b * inv.h2_23 * RAISE)
        jumps.append(alpha * c * a * elastic)
    return hamiltonian, [j for j in jumps if np.any(j != 0)]


def _lindblad_rhs(
    hamiltonian: Matrix2,
    jumps: list[Matrix2],
    t2: Optional[float],
) -> Callable[[float, npt.NDArray[np.float64]], npt.NDArray[np.float64]]:
    pairs = [(j, j.conj().T) for j in jumps]
    loss = sum((jd @ j for j, jd in pairs), np.zeros((2, 2), dtype=np.complex128))

    def rhs(t: float, y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        rho = (y[:4] + 1j * y[4:]).reshape(2, 2)
        drho = -1j * (hamiltonian @ rho - rho @ hamiltonian)
        for j, jd in pairs:
            drho += j @ rho @ jd
        drho -= 0.5 * (loss @ rho + rho @ loss)
        if t2 is not None:
            # Gaussian decay exp(-(t/T2)^2) from a dephasing rate growing linearly in t
            drho += (t / t2**2) * (SIGMA_Z @ rho @ SIGMA_Z - rho)
        return np.concatenate([drho.real.ravel(), drho.imag.ravel()])

    return rhs


def numeric_trajectory(
    rho0: GroundState,
    p: HybridParams,
    d: DressedBasis,
    alpha2: float,
    times: Sequence[float],
    tol: Optional[float] = None,
    t2: Optional[float] = None,
    eps1: Optional[float] = None,
    eps2: Optional[float] = None,
) -> list[GroundState]:
    """
    Integrate the effective master equation and sample it at the given times.

    Args:
        rho0: Initial state.
        p: Validated parameters.
        d: Dressed basis of p.
        alpha2: Photon flux.
        times: Non-decreasing, non-negative sample times.
        tol: Relative and absolute tolerance, defaults to settings.integrator_tol.
        t2: Optional Gaussian coherence time of the qubit.
        eps1: Probe detuning offset passed to the inversion.
        eps2: Splitting offset passed to the inversion.

    Returns:
        States at the requested times.

    Raises:
        DomainError: If the times are negative or unsorted.
        IntegrationFailureError: If the integrator stops early.
    """
    tol = settings.integrator_tol if tol is None else tol
    grid = np.asarray(times, dtype=float)
    if grid.size == 0:
        return []
    if np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise DomainError("sample times must be non-negative and non-decreasing")
    if alpha2 < 0:
        raise DomainError(f"flux must be non-negative, got {alpha2:g}")

    t_end = float(grid[-1])
    if t_end == 0.0:
        return [rho0 for _ in grid]

    inv = inverse_elements(p, d, eps1, eps2)
    hamiltonian, jumps = effective_operators(p, d, alpha2, inv)
    rho = rho0.as_matrix()
    y0 = np.concatenate([rho.real.ravel(), rho.imag.ravel()])

    solution = solve_ivp(
        _lindblad_rhs(hamiltonian, jumps, t2),
        (0.0, t_end),
        y0,
        method="RK45",
        t_eval=grid,
        rtol=tol,
        atol=tol,
    )
    if not solution.success:
        raise IntegrationFailureError(f"master-equation integration failed: {solution.message}")
    logger.debug(f"Integrated to t={t_end:g} in {solution.nfev} evaluations")

    states = []
    for column in solution.y.T:
        states.append(GroundState.from_matrix((column[:4] + 1j * column[4:]).reshape(2, 2)))
    return states


def evolve_numeric(
    rho0: GroundState,
    p: HybridParams,
    d: DressedBasis,
    alpha2: float,
    t: float,
    tol: Optional[float] = None,
    t2: Optional[float] = None,
) -> GroundState:
    """Numerically integrated state at a single time t."""
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t:g}")
    return numeric_trajectory(rho0, p, d, alpha2, [t], tol=tol, t2=t2)[-1]


def min_eigenvalue(state: GroundState) -> float:
    """Smallest eigenvalue of the density matrix (positivity check)."""
    return float(np.linalg.eigvalsh(state.as_matrix()).min())
