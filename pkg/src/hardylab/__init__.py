"""Numerical laboratory for -Delta u - mu/delta^2 u + |u|^{q-1} u = 0 on radial domains."""
from ._core import BACKEND
from .exponents import DomainError, Regime, classify, critical_q, exponents
from .geometry import RadialDomain, make_grid, normalized_trace, weighted_lq_norm
from .hardy import HardyRefusal, ground_state, hardy_constant, local_hardy_constant
from .linear import green_potential, harmonic_profile, kernel_lq_test, martin_halfspace, radial_green
from .nonlinear import (NonlinearProblem, NonuniquenessRefusal, SolverFailure, maximal_solution,
                        monotone_iteration, nonuniqueness_demo, solve_dirichlet, solve_strip,
                        solve_with_trace)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DomainError", "HardyRefusal", "NonlinearProblem", "NonuniquenessRefusal",
    "RadialDomain", "Regime", "SolverFailure", "classify", "critical_q", "exponents",
    "green_potential", "ground_state", "hardy_constant", "harmonic_profile", "kernel_lq_test",
    "local_hardy_constant", "make_grid", "martin_halfspace", "maximal_solution", "monotone_iteration",
    "normalized_trace", "nonuniqueness_demo", "radial_green", "solve_dirichlet", "solve_strip",
    "solve_with_trace", "weighted_lq_norm",
]
