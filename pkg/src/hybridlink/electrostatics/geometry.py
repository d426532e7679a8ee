"""
Island / waveguide / substrate layout.

Frame (nm): z is vertical with the substrate surface at z = 0 and vacuum above,
y runs along the waveguide, x across it. The island rests on the surface,
centered on x = y = 0. The waveguide is buried below the surface with its top
face at z = -d.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from hybridlink.models.schemas import Geometry, MoleculePosition

Box = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class Layout:
    """Resolved boxes of the geometry."""

    island: Box
    waveguide_x: tuple[float, float]
    waveguide_z: tuple[float, float]


def layout(g: Geometry) -> Layout:
    half_w = 0.5 * g.island_width
    half_l = 0.5 * g.island_length
    top = -g.distance
    return Layout(
        island=((-half_w, half_w), (-half_l, half_l), (0.0, g.island_height)),
        waveguide_x=(-0.5 * g.waveguide_width, 0.5 * g.waveguide_width),
        waveguide_z=(top - g.waveguide_height, top),
    )


def molecule_coordinates(g: Geometry, position: MoleculePosition | None = None) -> tuple[float, float, float]:
    """
    Coordinates of the molecule for one of the labelled positions.

    Near edge: below the island edge, edge_inset inside the top face of the guide.
    Center: waveguide centroid. Far edge: below the island edge, edge_inset inside
    the bottom face.
    """
    if g.molecule_override is not None and position is None:
        return g.molecule_override
    position = g.molecule_position if position is None else position
    edge_x = 0.5 * g.island_width
    top = -g.distance
    if position is MoleculePosition.NEAR_EDGE:
        return (edge_x, 0.0, top - g.edge_inset)
    if position is MoleculePosition.CENTER:
        return (0.0, 0.0, top - 0.5 * g.waveguide_height)
    return (edge_x, 0.0, top - g.waveguide_height + g.edge_inset)


def extent(g: Geometry) -> float:
    """Largest linear size of the structure."""
    return max(
        g.island_length,
        g.island_width,
        g.waveguide_width,
        g.distance + g.waveguide_height + g.island_height,
    )


def permittivity(
    g: Geometry,
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
    z: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """
    Relative permittivity sampled at the nodes of a tensor grid.

    Nodes on the substrate surface take the mean of substrate and cover.
    """
    lay = layout(g)
    xx, _, zz = np.meshgrid(x, y, z, indexing="ij")
    eps = np.full(xx.shape, g.eps_substrate)
    eps[zz > 0] = g.eps_vacuum
    eps[np.isclose(zz, 0.0)] = 0.5 * (g.eps_vacuum + g.eps_substrate)
    inside = (
        (xx >= lay.waveguide_x[0])
        & (xx <= lay.waveguide_x[1])
        & (zz >= lay.waveguide_z[0])
        & (zz <= lay.waveguide_z[1])
    )
    eps[inside] = g.eps_waveguide
    return eps


def box_mask(
    box: Box,
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
    z: npt.NDArray[np.float64],
    tol: float = 1e-9,
) -> npt.NDArray[np.bool_]:
    """Grid nodes lying inside a closed box."""
    (x0, x1), (y0, y1), (z0, z1) = box
    mx = (x >= x0 - tol) & (x <= x1 + tol)
    my = (y >= y0 - tol) & (y <= y1 + tol)
    mz = (z >= z0 - tol) & (z <= z1 + tol)
    return mx[:, None, None] & my[None, :, None] & mz[None, None, :]
