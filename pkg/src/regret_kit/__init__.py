"""Interval min-max regret solvers: AMU, logic-based Benders and the LP-dual heuristic."""

from .core import (
    IntervalCostVector,
    RobustProblem,
    Scenario,
    SolveReport,
    amu,
    benders,
    brute_force_robust,
    induced_scenario,
    lph,
    midpoint_scenario,
    robustness_cost,
    worst_case_scenario,
)
from .errors import (
    CapExceeded,
    ClassicalSolveTimeout,
    InfeasibleProblem,
    InfeasibleSolution,
    ParseError,
    RegretKitError,
)
from .rrsp import IntervalDigraph, Path, RRSPProblem, classical_rsp, extract_elementary, generate_coco, generate_karasan
from .rsc import CoverStructure, IntervalCoverProblem, RSCProblem, classical_sc, generate_beasley, generate_kz, generate_montemanni

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "ClassicalSolveTimeout",
    "CoverStructure",
    "InfeasibleProblem",
    "InfeasibleSolution",
    "IntervalCostVector",
    "IntervalCoverProblem",
    "IntervalDigraph",
    "ParseError",
    "Path",
    "RRSPProblem",
    "RSCProblem",
    "RegretKitError",
    "RobustProblem",
    "Scenario",
    "SolveReport",
    "amu",
    "benders",
    "brute_force_robust",
    "classical_rsp",
    "classical_sc",
    "extract_elementary",
    "generate_beasley",
    "generate_coco",
    "generate_karasan",
    "generate_kz",
    "generate_montemanni",
    "induced_scenario",
    "lph",
    "midpoint_scenario",
    "robustness_cost",
    "worst_case_scenario",
]
