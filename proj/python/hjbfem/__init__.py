"""Monotone P1 finite elements for Hamilton-Jacobi-Bellman equations."""

from ._hjbfem import (
    CflError,
    ConvergenceError,
    Error,
    InputError,
    Mesh,
    MeshError,
    check_acute,
    convergence_study,
    eikonal_study,
    equilateral_triangle_mesh,
    format_mesh,
    lattice_domain,
    load_mesh,
    max_boundary_distance,
    min_monotone_diffusion,
    newton_study,
    read_mesh,
    run_cli,
    solve,
    uniform_refine,
)

__all__ = [
    "CflError",
    "ConvergenceError",
    "Error",
    "InputError",
    "Mesh",
    "MeshError",
    "check_acute",
    "convergence_study",
    "eikonal_study",
    "equilateral_triangle_mesh",
    "format_mesh",
    "lattice_domain",
    "load_mesh",
    "max_boundary_distance",
    "min_monotone_diffusion",
    "newton_study",
    "read_mesh",
    "run_cli",
    "solve",
    "uniform_refine",
]
