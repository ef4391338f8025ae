"""Spectral parameter power series for Sturm-Liouville, quantum-well and Dirac problems.

Also builds transmutation kernels, including Darboux-transformed ones, and
applies the corresponding Volterra operators.
"""

__version__ = "0.1.0"

from .darboux import darboux_chain, darboux_kernel, darboux_potential, generalized_derivatives
from .dirac import DiracSpec, dirac_residuals, dirac_solve
from .errors import (ConvergenceError, DomainError, InputError, OutOfRangeError, SingularSolutionError,
                     SppsError, TruncationWarning)
from .expr import ExprError, PotentialExpr, parse_potential_expr
from .grid import (GridFn, bessel_eval, cumulative_integral, derivative, interpolate, second_difference)
from .powers import FormalPowerFamily, build_nonvanishing_solution, build_powers, particular_solution
from .roots import Disk, Interval
from .solutions import SppsEval, eval_solution, shift_center
from .spectral import (CharPolynomial, SLProblemSpec, WellProblem, WellSpec, char_polynomial, find_roots,
                       magnitude_map, problem_family, solve_sl, solve_well)
from .transmutation import (Kernel2D, apply_kernel, cos_sin_kernels, goursat_defects, goursat_kernel,
                            kernel_constant_q, reparametrize_h)

__all__ = [
    "CharPolynomial", "ConvergenceError", "DiracSpec", "Disk", "DomainError", "ExprError",
    "FormalPowerFamily", "GridFn", "InputError", "Interval", "Kernel2D", "OutOfRangeError",
    "PotentialExpr", "SLProblemSpec", "SingularSolutionError", "SppsError", "SppsEval",
    "TruncationWarning", "WellProblem", "WellSpec", "apply_kernel", "bessel_eval",
    "build_nonvanishing_solution", "build_powers", "char_polynomial", "cos_sin_kernels",
    "cumulative_integral", "darboux_chain", "darboux_kernel", "darboux_potential", "derivative",
    "dirac_residuals", "dirac_solve", "eval_solution", "find_roots", "generalized_derivatives",
    "goursat_defects", "goursat_kernel", "interpolate", "kernel_constant_q", "magnitude_map",
    "parse_potential_expr", "particular_solution", "problem_family", "reparametrize_h",
    "second_difference", "shift_center", "solve_sl", "solve_well",
]
