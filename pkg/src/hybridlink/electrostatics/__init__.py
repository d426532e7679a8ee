"""Electrostatics module for the Cooper-pair field and Stark coupling."""

from hybridlink.electrostatics.field import (
    DEBYE,
    coupling_from_field,
    field_island_fd,
    field_point_charge,
    field_profile,
    grid_convergence,
    solve_island,
)
from hybridlink.electrostatics.geometry import molecule_coordinates
from hybridlink.electrostatics.solver import LaplaceSolution, graded_axis, solve_conductor

__all__ = [
    "DEBYE",
    "LaplaceSolution",
    "coupling_from_field",
    "field_island_fd",
    "field_point_charge",
    "field_profile",
    "graded_axis",
    "grid_convergence",
    "molecule_coordinates",
    "solve_conductor",
    "solve_island",
]
