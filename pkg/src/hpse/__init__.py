"""High-precision eigenvalues of -s^2 psi'' + V psi = eps psi for even
polynomial potentials V(x) = x^(2M) + sum v_m x^(2m)."""

from .bigreal import BigReal, PrecisionCtx, make_context, parse_decimal, render_decimal
from .eigensolver import EigResult, solve_eigenvalue
from .estimator import PrecisionPlan, build_plan, choose_x, delta_d_estimate, pest
from .potential import PotentialSpec, StateIndex
from .series import SeriesEval, log_derivative, sum_series
from .splitting import SplittingReport, compare_to_asymptotics, solve_pair, zinn_justin_gap

__version__ = "0.1.0"

__all__ = [
    "BigReal",
    "PrecisionCtx",
    "make_context",
    "parse_decimal",
    "render_decimal",
    "PotentialSpec",
    "StateIndex",
    "SeriesEval",
    "sum_series",
    "log_derivative",
    "PrecisionPlan",
    "pest",
    "delta_d_estimate",
    "choose_x",
    "build_plan",
    "EigResult",
    "solve_eigenvalue",
    "SplittingReport",
    "solve_pair",
    "zinn_justin_gap",
    "compare_to_asymptotics",
    "__version__",
]
