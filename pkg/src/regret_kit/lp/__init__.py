"""Self-contained LP (bounded-variable primal and dual simplex with duals) and 0-1 MILP engine."""

from .bnb import solve_milp
from .dump import to_lp_text
from .model import (
    EPS_DUAL,
    EPS_FEAS,
    EPS_GAP,
    EPS_INT,
    LinearProgram,
    LpSolution,
    MalformedModel,
    MilpResult,
    MixedIntegerProgram,
    NumericalFailure,
    SolverTimeout,
)
from .simplex import SimplexModel, WarmStart, dual_objective, solve_lp

__all__ = [
    "EPS_DUAL",
    "EPS_FEAS",
    "EPS_GAP",
    "EPS_INT",
    "LinearProgram",
    "LpSolution",
    "MalformedModel",
    "MilpResult",
    "MixedIntegerProgram",
    "NumericalFailure",
    "SimplexModel",
    "SolverTimeout",
    "WarmStart",
    "dual_objective",
    "solve_lp",
    "solve_milp",
    "to_lp_text",
]
