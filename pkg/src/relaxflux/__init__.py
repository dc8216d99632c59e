"""Finite-volume solver for the 2-D compressible Euler and Navier-Stokes equations.

Interface fluxes come from the generalized Riemann problem of a relaxation
system. Viscous terms are implicit and solved by Jacobi iteration.
"""
from .cases import CaseSpec, register_cases
from .driver import advance, compute_dt, convergence_order, convergence_table, error_norms
from .grid import BoundarySpec, Mesh
from .implicit import RFSSolver, SolverConfig, single_step
from .physics import TransportCoefficients

__all__ = [
    "BoundarySpec", "CaseSpec", "Mesh", "RFSSolver", "SolverConfig",
    "advance", "compute_dt", "convergence_order", "convergence_table", "error_norms",
    "register_cases", "single_step", "TransportCoefficients",
]
