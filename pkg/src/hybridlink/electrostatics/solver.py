"""
Finite-volume Laplace solver on graded tensor-product grids.

Solves div(eps grad phi) = 0 with a fixed-potential conductor and a grounded
outer box. Face permittivities are harmonic means of the node values, so
dielectric interfaces keep the normal displacement continuous. The linear
system is solved with sparse conjugate gradients or with vectorized red-black
over-relaxation.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.constants import e as ELEMENTARY_CHARGE
from scipy.constants import epsilon_0
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import cg

from hybridlink.config import settings
from hybridlink.errors import GridTooCoarseError, NonConvergenceError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

NM = 1e-9
COOPER_PAIR_CHARGE = 2 * ELEMENTARY_CHARGE
SOR_OMEGA = 1.9


def graded_axis(
    core_lo: float,
    core_hi: float,
    spacing: float,
    outer_lo: float,
    outer_hi: float,
    growth: float = 1.25,
) -> FloatArray:
    """
    Axis with uniform spacing in the core and geometric growth outside.

    Core nodes sit on integer multiples of the spacing, so geometry faces that
    are multiples of it fall exactly on nodes.
    """
    start = np.floor(core_lo / spacing) * spacing
    stop = np.ceil(core_hi / spacing) * spacing
    core = start + spacing * np.arange(int(round((stop - start) / spacing)) + 1)

    upper = [core[-1]]
    step = spacing
    while upper[-1] < outer_hi:
        step *= growth
        upper.append(upper[-1] + step)
    lower = [core[0]]
    step = spacing
    while lower[-1] > outer_lo:
        step *= growth
        lower.append(lower[-1] - step)
    return np.concatenate([np.array(lower[:0:-1]), core, np.array(upper[1:])])


def _dual_widths(axis: FloatArray) -> FloatArray:
    widths = np.empty_like(axis)
    widths[1:-1] = 0.5 * (axis[2:] - axis[:-2])
    widths[0] = 0.5 * (axis[1] - axis[0])
    widths[-1] = 0.5 * (axis[-1] - axis[-2])
    return widths


def _harmonic(a: FloatArray, b: FloatArray) -> FloatArray:
    return 2 * a * b / (a + b)


def face_weights(
    x: FloatArray, y: FloatArray, z: FloatArray, eps: FloatArray
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Coupling weights eps_face * area / length between neighbouring nodes.

    Returns:
        Weights along x, y and z with shapes (nx-1, ny, nz), (nx, ny-1, nz)
        and (nx, ny, nz-1), in units of nm.
    """
    dx, dy, dz = np.diff(x), np.diff(y), np.diff(z)
    wx_, wy_, wz_ = _dual_widths(x), _dual_widths(y), _dual_widths(z)

    ex = _harmonic(eps[:-1], eps[1:])
    ey = _harmonic(eps[:, :-1], eps[:, 1:])
    ez = _harmonic(eps[:, :, :-1], eps[:, :, 1:])

    wx = ex * (wy_[None, :, None] * wz_[None, None, :]) / dx[:, None, None]
    wy = ey * (wx_[:, None, None] * wz_[None, None, :]) / dy[None, :, None]
    wz = ez * (wx_[:, None, None] * wy_[None, :, None]) / dz[None, None, :]
    return wx, wy, wz


def _apply(wx: FloatArray, wy: FloatArray, wz: FloatArray, phi: FloatArray) -> FloatArray:
    """Net flux sum_faces w (phi_node - phi_neighbour) at every node."""
    out = np.zeros_like(phi)
    for axis, w in enumerate((wx, wy, wz)):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        jump = w * (phi[tuple(lo)] - phi[tuple(hi)])
        out[tuple(lo)] += jump
        out[tuple(hi)] -= jump
    return out


def _diagonal(wx: FloatArray, wy: FloatArray, wz: FloatArray, shape: tuple[int, ...]) -> FloatArray:
    diag = np.zeros(shape)
    diag[:-1] += wx
    diag[1:] += wx
    diag[:, :-1] += wy
    diag[:, 1:] += wy
    diag[:, :, :-1] += wz
    diag[:, :, 1:] += wz
    return diag


def _assemble(wx: FloatArray, wy: FloatArray, wz: FloatArray, shape: tuple[int, ...]) -> sparse.csr_matrix:
    index = np.arange(np.prod(shape)).reshape(shape)
    rows, cols, vals = [], [], []
    for axis, w in enumerate((wx, wy, wz)):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        a = index[tuple(lo)].ravel()
        b = index[tuple(hi)].ravel()
        wf = w.ravel()
        rows += [a, b]
        cols += [b, a]
        vals += [-wf, -wf]
    diag = _diagonal(wx, wy, wz, shape).ravel()
    rows.append(index.ravel())
    cols.append(index.ravel())
    vals.append(diag)
    n = int(np.prod(shape))
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()


def _solve_cg(
    wx: FloatArray,
    wy: FloatArray,
    wz: FloatArray,
    phi: FloatArray,
    fixed: BoolArray,
    tol: float,
    max_iter: int,
) -> tuple[FloatArray, int]:
    matrix = _assemble(wx, wy, wz, phi.shape)
    free = ~fixed.ravel()
    values = phi.ravel().copy()

    a_ff = matrix[free][:, free]
    rhs = -matrix[free][:, ~free] @ values[~free]
    preconditioner = sparse.diags(1.0 / a_ff.diagonal())

    iterations = 0

    def count(_: FloatArray) -> None:
        nonlocal iterations
        iterations += 1

    solution, info = cg(
        a_ff, rhs, rtol=tol, atol=0.0, maxiter=max_iter, M=preconditioner, callback=count
    )
    if info != 0:
        raise NonConvergenceError(f"conjugate gradient stopped after {iterations} iterations (info={info})")
    values[free] = solution
    return values.reshape(phi.shape), iterations


def _solve_sor(
    wx: FloatArray,
    wy: FloatArray,
    wz: FloatArray,
    phi: FloatArray,
    fixed: BoolArray,
    tol: float,
    max_iter: int,
    omega: float = SOR_OMEGA,
) -> tuple[FloatArray, int]:
    phi = phi.copy()
    diag = _diagonal(wx, wy, wz, phi.shape)
    ii, jj, kk = np.indices(phi.shape)
    colors = [(~fixed) & ((ii + jj + kk) % 2 == c) for c in (0, 1)]
    free = ~fixed

    for iteration in range(1, max_iter + 1):
        for mask in colors:
            # diag * phi - _apply(phi) is the neighbour sum
            neighbours = diag * phi - _apply(wx, wy, wz, phi)
            phi[mask] += omega * (neighbours[mask] / diag[mask] - phi[mask])
        if iteration % 10 == 0:
            residual = np.max(np.abs(_apply(wx, wy, wz, phi)[free] / diag[free]))
            if residual < tol:
                return phi, iteration
    raise NonConvergenceError(f"over-relaxation did not reach {tol:g} in {max_iter} sweeps")


@dataclass
class LaplaceSolution:
    """Potential of a charged conductor on a tensor grid."""

    x: FloatArray
    y: FloatArray
    z: FloatArray
    potential: FloatArray
    island_voltage: float
    charge: float
    residual: float
    iterations: int

    def field_at(self, points: npt.ArrayLike) -> FloatArray:
        """
        Field magnitude in kV/m at the given (x, y, z) points in nm.
        """
        grads = np.gradient(self.potential, self.x, self.y, self.z)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        components = [
            RegularGridInterpolator((self.x, self.y, self.z), g)(pts) for g in grads
        ]
        # V/nm -> kV/m
        return np.sqrt(sum(c**2 for c in components)) * 1e6


def solve_conductor(
    x: FloatArray,
    y: FloatArray,
    z: FloatArray,
    eps: FloatArray,
    conductor: BoolArray,
    charge: float = COOPER_PAIR_CHARGE,
    method: Optional[str] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> LaplaceSolution:
    """
    Potential of a conductor carrying a given charge inside a grounded box.

    The conductor is first held at 1 V; the discrete Gauss-law flux out of its
    nodes gives the induced charge, and the potential is rescaled so the
    conductor carries ``charge``.

    Args:
        x, y, z: Node coordinates in nm.
        eps: Relative permittivity at the nodes.
        conductor: Nodes belonging to the conductor.
        charge: Total conductor charge in C.
        method: "cg" or "sor", defaults to settings.fd_method.
        tol: Solver tolerance, defaults to settings.fd_tolerance.
        max_iter: Iteration cap, defaults to settings.fd_max_iter.

    Raises:
        GridTooCoarseError: If no node lies inside the conductor.
        NonConvergenceError: If the solver stops above tolerance.
    """
    method = settings.fd_method if method is None else method
    tol = settings.fd_tolerance if tol is None else tol
    max_iter = settings.fd_max_iter if max_iter is None else max_iter
    if not conductor.any():
        raise GridTooCoarseError("no grid node falls inside the conductor")

    shape = (x.size, y.size, z.size)
    fixed = conductor.copy()
    fixed[[0, -1], :, :] = True
    fixed[:, [0, -1], :] = True
    fixed[:, :, [0, -1]] = True

    phi = np.where(conductor, 1.0, 0.0)
    wx, wy, wz = face_weights(x, y, z, eps)
    logger.debug(f"Laplace solve on {shape} grid ({np.prod(shape)} nodes) with {method}")

    if method == "sor":
        phi, iterations = _solve_sor(wx, wy, wz, phi, fixed, tol, max_iter)
    else:
        phi, iterations = _solve_cg(wx, wy, wz, phi, fixed, tol, max_iter)

    flux = _apply(wx, wy, wz, phi)
    diag = _diagonal(wx, wy, wz, shape)
    free = ~fixed
    residual = float(np.max(np.abs(flux[free] / diag[free]))) if free.any() else 0.0

    unit_charge = epsilon_0 * NM * float(np.sum(flux[conductor]))
    if unit_charge <= 0:
        raise NonConvergenceError("conductor carries no induced charge at 1 V")
    scale = charge / unit_charge
    logger.debug(
        f"Converged in {iterations} iterations, residual {residual:.2e}, island at {scale:.4g} V"
    )
    return LaplaceSolution(
        x=x,
        y=y,
        z=z,
        potential=phi * scale,
        island_voltage=scale,
        charge=unit_charge * scale,
        residual=residual,
        iterations=iterations,
    )


def check_spacing(spacing: float, distance: float) -> None:
    """Raise GridTooCoarseError when the core spacing exceeds d/8."""
    if spacing > distance / 8:
        raise GridTooCoarseError(
            f"grid spacing {spacing:g} nm exceeds d/8 = {distance / 8:g} nm"
        )
