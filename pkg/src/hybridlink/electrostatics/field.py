"""
Static field of a Cooper pair and the resulting molecule-qubit coupling.

The point-charge estimate treats the Cooper pair as a charge at the surface of a
semi-infinite dielectric. The island estimate solves the electrostatics of the
full island / waveguide / substrate structure on a finite-volume grid.
"""

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import e as ELEMENTARY_CHARGE
from scipy.constants import epsilon_0, h

from hybridlink.cache.manager import get_cached_field, save_field
from hybridlink.config import settings
from hybridlink.electrostatics.geometry import (
    box_mask,
    extent,
    layout,
    molecule_coordinates,
    permittivity,
)
from hybridlink.electrostatics.solver import (
    FloatArray,
    LaplaceSolution,
    check_spacing,
    graded_axis,
    solve_conductor,
)
from hybridlink.errors import DomainError
from hybridlink.models.schemas import Geometry, MoleculePosition, StarkCoupling

logger = logging.getLogger(__name__)

DEBYE = 1e-21 / SPEED_OF_LIGHT  # C m
CACHE_VERSION = 1
OVERRIDE_KEY = "override"


def field_point_charge(distance_nm: float, eps_r: float) -> float:
    """
    Field of a Cooper pair at the surface of a dielectric half-space, in kV/m.

    Args:
        distance_nm: Distance between charge and molecule.
        eps_r: Relative permittivity of the medium holding the molecule.

    Raises:
        DomainError: If the distance is not positive or eps_r < 1.
    """
    if distance_nm <= 0:
        raise DomainError(f"distance must be positive, got {distance_nm:g} nm")
    if eps_r < 1:
        raise DomainError(f"relative permittivity must be >= 1, got {eps_r:g}")
    r = distance_nm * 1e-9
    vacuum = 2 * ELEMENTARY_CHARGE / (4 * math.pi * epsilon_0 * r**2)
    return vacuum * 2 / (1 + eps_r) * 1e-3


def coupling_from_field(field_kv_m: float, dipole_debye: float = 1.0) -> StarkCoupling:
    """
    Molecule-qubit coupling g_c/2pi produced by a static field change.

    Returns:
        StarkCoupling with the linear-Stark-coefficient value and the
        dipole-times-field / h value, both in MHz.
    """
    stark = settings.stark_mhz_per_kv_m * field_kv_m * dipole_debye
    first_principles = dipole_debye * DEBYE * field_kv_m * 1e3 / h * 1e-6
    return StarkCoupling(
        field_kv_m=field_kv_m,
        dipole_debye=dipole_debye,
        g_c_mhz=stark,
        first_principles_mhz=first_principles,
    )


def build_grid(g: Geometry, spacing: float) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Graded grid covering the structure inside a box 5x its extent."""
    pad = 4 * spacing
    half_box = 2.5 * extent(g)
    center_z = 0.5 * (g.island_height - g.distance - g.waveguide_height)
    half_x = 0.5 * max(g.waveguide_width, g.island_width) + pad
    half_y = 0.5 * g.island_length + pad

    x = graded_axis(-half_x, half_x, spacing, -half_box, half_box)
    y = graded_axis(-half_y, half_y, spacing, -half_box, half_box)
    z = graded_axis(
        -(g.distance + g.waveguide_height + pad),
        g.island_height + pad,
        spacing,
        center_z - half_box,
        center_z + half_box,
    )
    return x, y, z


def solve_island(
    g: Geometry,
    spacing: Optional[float] = None,
    method: Optional[str] = None,
) -> LaplaceSolution:
    """
    Potential of the island carrying one Cooper pair.

    Raises:
        GridTooCoarseError: If spacing > d/8 or the island holds no node.
        NonConvergenceError: If the Laplace solve does not converge.
    """
    spacing = settings.fd_spacing_nm if spacing is None else spacing
    check_spacing(spacing, g.distance)
    x, y, z = build_grid(g, spacing)
    eps = permittivity(g, x, y, z)
    island = box_mask(layout(g).island, x, y, z)
    logger.info(
        f"Solving island field: d={g.distance:g} nm, H={g.waveguide_height:g} nm, "
        f"h={spacing:g} nm, {x.size}x{y.size}x{z.size} nodes"
    )
    return solve_conductor(x, y, z, eps, island, method=method)


def _probe_points(g: Geometry) -> dict[str, tuple[float, float, float]]:
    points = {pos.value: molecule_coordinates(g, pos) for pos in MoleculePosition}
    if g.molecule_override is not None:
        points[OVERRIDE_KEY] = g.molecule_override
    return points


def field_profile(
    g: Geometry,
    spacing: Optional[float] = None,
    method: Optional[str] = None,
    use_cache: bool = True,
) -> dict[str, float]:
    """
    Field at every labelled molecule position from a single solve.

    Returns:
        Mapping from position label (and "override" when set) to |E| in kV/m.
    """
    spacing = settings.fd_spacing_nm if spacing is None else spacing
    method = settings.fd_method if method is None else method
    request = {
        "version": CACHE_VERSION,
        "geometry": g.model_dump(mode="json"),
        "spacing": spacing,
        "method": method,
    }
    if use_cache:
        cached = get_cached_field(request)
        if cached is not None:
            logger.debug(f"Using cached field for d={g.distance:g} nm")
            return {k: float(v) for k, v in cached.items()}

    solution = solve_island(g, spacing, method)
    points = _probe_points(g)
    values = solution.field_at(np.array(list(points.values())))
    result = {name: float(v) for name, v in zip(points, values, strict=True)}
    if use_cache:
        save_field(request, result)
    return result


def field_island_fd(
    g: Geometry,
    spacing: Optional[float] = None,
    method: Optional[str] = None,
    use_cache: bool = True,
) -> float:
    """
    Field of the charged island at the selected molecule position, in kV/m.

    Args:
        g: Geometry, including the molecule position.
        spacing: Core grid spacing in nm, at most d/8.
        method: Laplace solver, "cg" or "sor".
        use_cache: Reuse and store results in the solve cache.
    """
    profile = field_profile(g, spacing, method, use_cache)
    if g.molecule_override is not None:
        return profile[OVERRIDE_KEY]
    return profile[g.molecule_position.value]


def grid_convergence(
    g: Geometry,
    spacings: Sequence[float],
    method: Optional[str] = None,
    use_cache: bool = True,
) -> tuple[list[float], float]:
    """
    Field at the molecule for a sequence of spacings.

    Returns:
        (fields in the order of ``spacings``, relative change between the two
        finest spacings).
    """
    if len(spacings) < 2:
        raise DomainError("grid convergence needs at least two spacings")
    fields = [field_island_fd(g, s, method, use_cache) for s in spacings]
    order = np.argsort(spacings)
    finest, next_finest = fields[order[0]], fields[order[1]]
    return fields, abs(finest - next_finest) / abs(finest)
