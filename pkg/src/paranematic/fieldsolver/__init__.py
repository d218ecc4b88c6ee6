"""Exterior-problem solvers: exact-basis collocation and an FD oracle."""

from .collocation import (FieldSolution, energy_area, energy_flux,
                          solve_collocation, suggest_mode_cutoff)
from .finite_difference import GridSolution, build_grid, solve_fd
from .nonlinear import radial_nonlinear_profile, solve_nonlinear
from .tails import tail_decay_rate

__all__ = [
    "FieldSolution",
    "GridSolution",
    "build_grid",
    "energy_area",
    "energy_flux",
    "radial_nonlinear_profile",
    "solve_collocation",
    "solve_fd",
    "solve_nonlinear",
    "suggest_mode_cutoff",
    "tail_decay_rate",
]
