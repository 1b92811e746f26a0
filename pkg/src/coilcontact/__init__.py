"""Constrained elastic profiles wound on a cylinder: solvers and diagnostics."""

from .coefficients import (
    CoefficientModel,
    make_custom,
    make_rod,
    make_rod_from_load,
    make_simple,
    validate_derivatives,
)
from .contact_structure import ContactStructure, build, eval_g, eval_g_window, smoothed_g
from .gridfn import (
    GridFunction,
    Solution,
    aligned_cells_per_unit,
    constraint_profile,
    contact_set,
    el_residual,
    energy,
    hamiltonian_profile,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientModel",
    "ContactStructure",
    "GridFunction",
    "Solution",
    "aligned_cells_per_unit",
    "build",
    "constraint_profile",
    "contact_set",
    "el_residual",
    "energy",
    "eval_g",
    "eval_g_window",
    "hamiltonian_profile",
    "make_custom",
    "make_rod",
    "make_rod_from_load",
    "make_simple",
    "smoothed_g",
    "validate_derivatives",
    "__version__",
]
