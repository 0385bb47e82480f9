"""Generic interval min-max regret machinery.

A concrete problem implements :class:`RobustProblem`; the algorithms here
(``amu``, ``benders``, ``lph`` and the ``brute_force_robust`` oracle) only
talk to that interface.
"""

from __future__ import annotations

import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import (
    CapExceeded,
    ClassicalSolveTimeout,
    DimensionMismatch,
    InfeasibleProblem,
    InfeasibleSolution,
)
from .lp import EPS_GAP, LinearProgram, MixedIntegerProgram, solve_milp


@dataclass(frozen=True, eq=False)
class IntervalCostVector:
    """Integer cost intervals ``[l_i, u_i]``, one per binary variable."""

    l: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        l = np.asarray(self.l).reshape(-1)
        u = np.asarray(self.u).reshape(-1)
        if l.shape != u.shape:
            raise DimensionMismatch(f"l has {l.size} entries, u has {u.size}")
        if l.size and (np.any(l != np.round(l)) or np.any(u != np.round(u))):
            raise ValueError("interval bounds must be integers")
        l = l.astype(np.int64)
        u = u.astype(np.int64)
        if np.any(l < 0):
            raise ValueError("interval bounds must be nonnegative")
        if np.any(l > u):
            raise ValueError("every interval needs l <= u")
        l.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.l.size

    def contains(self, c: np.ndarray, tol: float = 0.0) -> bool:
        c = np.asarray(c, dtype=float)
        return c.shape == self.l.shape and bool(np.all(c >= self.l - tol) and np.all(c <= self.u + tol))


@dataclass(frozen=True, eq=False)
class Scenario:
    """One cost vector inside an interval box."""

    c: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).reshape(-1).copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def __len__(self) -> int:
        return self.c.size

    def cost(self, y: np.ndarray) -> float:
        return float(self.c @ np.asarray(y, dtype=float))


def _binary_vector(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise DimensionMismatch(f"solution has shape {y.shape}, expected ({n},)")
    if np.any((y != 0) & (y != 1)):
        raise ValueError("solution must be a 0-1 vector")
    return y.astype(np.int64)


def induced_scenario(y, iv: IntervalCostVector) -> Scenario:
    """Costs at the upper bound where ``y`` is 1 and the lower bound elsewhere."""
    y = _binary_vector(y, iv.n)
    return Scenario(np.where(y == 1, iv.u, iv.l))


def midpoint_scenario(iv: IntervalCostVector) -> Scenario:
    return Scenario((iv.l + iv.u) / 2.0)


def worst_case_scenario(iv: IntervalCostVector) -> Scenario:
    return Scenario(iv.u)


@dataclass(frozen=True)
class FeasibilityRows:
    """Linear description ``A y (rel) b`` of the feasible set over binary ``y``."""

    A: np.ndarray
    relations: tuple[str, ...]
    b: np.ndarray


class RobustProblem(ABC):
    """What a concrete interval min-max regret problem provides.

    ``solve_classical`` must return an exact minimizer over the feasible set
    in the given scenario, as a 0-1 numpy vector together with its cost.
    """

    @abstractmethod
    def intervals(self) -> IntervalCostVector: ...

    @abstractmethod
    def solve_classical(self, scenario: Scenario, time_limit: float = math.inf) -> tuple[np.ndarray, float]: ...

    @abstractmethod
    def feasibility_mip(self) -> FeasibilityRows: ...

    @abstractmethod
    def heuristic_mip(self) -> tuple[MixedIntegerProgram, np.ndarray]:
        """The single-level dual-coupled MILP and the column indices of ``y`` in it."""

    @abstractmethod
    def enumerate_feasible(self, cap: int) -> Iterator[np.ndarray]: ...

    def is_feasible(self, y: np.ndarray) -> bool:
        rows = self.feasibility_mip()
        act = rows.A @ np.asarray(y, dtype=float)
        for a, rel, b in zip(act, rows.relations, rows.b):
            if (rel == "<=" and a > b + 1e-9) or (rel == ">=" and a < b - 1e-9) or (rel == "=" and abs(a - b) > 1e-9):
                return False
        return True

    def canonical(self, y: np.ndarray) -> np.ndarray:
        """Map a feasible ``y`` to the representative reported to users."""
        return y


class Budget:
    """A single wall-clock budget shared by the steps of one algorithm run."""

    def __init__(self, time_limit: float):
        self.start = time.monotonic()
        self.time_limit = time_limit

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def remaining(self) -> float:
        if not math.isfinite(self.time_limit):
            return math.inf
        return max(self.time_limit - self.elapsed(), 1e-3)

    def expired(self) -> bool:
        return math.isfinite(self.time_limit) and self.elapsed() >= self.time_limit


@dataclass
class SolveReport:
    algorithm: str
    y: np.ndarray | None
    robustness_cost: int | None
    lower_bound: float = -math.inf
    iterations: int = 0
    cuts: int = 0
    wall_time: float = 0.0
    status: str = "HeuristicUB"
    heuristic_objective: float | None = None
    nodes: int = 0
    lb_history: list[float] = field(default_factory=list)
    ub_history: list[float] = field(default_factory=list)

    @property
    def upper_bound(self) -> float:
        if self.robustness_cost is not None:
            return float(self.robustness_cost)
        if self.heuristic_objective is not None:
            return self.heuristic_objective
        return math.inf


def _regret(y: np.ndarray, problem: RobustProblem, time_limit: float) -> tuple[int, np.ndarray]:
    iv = problem.intervals()
    y = _binary_vector(y, iv.n)
    if not problem.is_feasible(y):
        raise InfeasibleSolution("solution violates the feasibility constraints")
    s = induced_scenario(y, iv)
    x, _ = problem.solve_classical(s, time_limit)
    x = _binary_vector(np.round(x), iv.n)
    c = s.c.astype(np.int64)
    return int(c @ y) - int(c @ x), x


def robustness_cost(y, problem: RobustProblem, time_limit: float = math.inf) -> int:
    """Maximum regret of ``y``: its cost minus the classical optimum, both in ``s(y)``."""
    return _regret(np.asarray(y), problem, time_limit)[0]


def amu(problem: RobustProblem, time_limit: float = math.inf) -> SolveReport:
    """Solve in the worst-case and midpoint scenarios; keep the lower robustness cost.

    Ties go to the midpoint solution.
    """
    budget = Budget(time_limit)
    iv = problem.intervals()
    y_u, _ = problem.solve_classical(worst_case_scenario(iv), budget.remaining() / 2)
    y_m, _ = problem.solve_classical(midpoint_scenario(iv), budget.remaining())
    y_u = np.round(y_u).astype(np.int64)
    y_m = np.round(y_m).astype(np.int64)
    r_m = robustness_cost(y_m, problem, budget.remaining())
    r_u = robustness_cost(y_u, problem, budget.remaining()) if not np.array_equal(y_u, y_m) else r_m
    y, r = (y_m, r_m) if r_m <= r_u else (y_u, r_u)
    return SolveReport("AMU", y, r, wall_time=budget.elapsed(), status="HeuristicUB")


def _master(problem: RobustProblem, cuts: list[np.ndarray]) -> MixedIntegerProgram:
    iv = problem.intervals()
    n = iv.n
    rows = problem.feasibility_mip()
    width = rows.A.shape[0] + len(cuts)
    A = np.zeros((width, n + 1))
    A[: rows.A.shape[0], :n] = rows.A
    b = np.zeros(width)
    b[: rows.A.shape[0]] = rows.b
    rel = list(rows.relations)
    span = (iv.u - iv.l).astype(float)
    for k, x in enumerate(cuts):
        r = rows.A.shape[0] + k
        # rho - sum_i (u_i - l_i) x_i y_i <= sum_i l_i x_i
        A[r, :n] = -span * x
        A[r, n] = 1.0
        b[r] = float(iv.l @ x)
        rel.append("<=")
    c = np.concatenate([iv.u.astype(float), [-1.0]])
    lb = np.concatenate([np.zeros(n), [-math.inf]])
    ub = np.concatenate([np.ones(n), [math.inf]])
    lp = LinearProgram(c, A, tuple(rel), b, lb, ub)
    return MixedIntegerProgram(lp, tuple(range(n)))


def benders(problem: RobustProblem, time_limit: float = math.inf) -> SolveReport:
    """Logic-based Benders decomposition over the regret reformulation.

    Step I seeds the cut set with the worst-case-scenario optimum, then each
    iteration solves the master MILP, evaluates the master solution exactly
    in its induced scenario (the slave), and either stops (master bound
    reaches that robustness cost) or adds the slave optimum as a new cut.
    """
    budget = Budget(time_limit)
    iv = problem.intervals()
    report = SolveReport("Benders", None, None, status="TimedOut")
    try:
        x1, _ = problem.solve_classical(worst_case_scenario(iv), budget.remaining())
    except ClassicalSolveTimeout:
        report.wall_time = budget.elapsed()
        return report
    cuts = [np.round(x1).astype(np.int64)]
    best_y: np.ndarray | None = None
    best_r = math.inf
    best_lb = -math.inf
    iterations = 0
    nodes = 0
    while True:
        if budget.expired():
            break
        iterations += 1
        res = solve_milp(_master(problem, cuts), budget.remaining(), integral_objective=True)
        nodes += res.nodes
        if res.status == "Infeasible":
            if iterations == 1:
                raise InfeasibleProblem("master problem infeasible")
            break
        if res.status != "Optimal":
            if math.isfinite(res.bound):
                best_lb = max(best_lb, res.bound)
            break
        y = np.round(res.x[: iv.n]).astype(np.int64)
        lb = float(res.objective)
        report.lb_history.append(lb)
        best_lb = max(best_lb, lb)
        try:
            r, x = _regret(y, problem, budget.remaining())
        except ClassicalSolveTimeout:
            break
        if r < best_r:
            best_r, best_y = r, y
        report.ub_history.append(best_r)
        if lb >= r - EPS_GAP:
            report.status = "Proved"
            best_y, best_r = y, r
            break
        cuts.append(x)
    report.iterations = iterations
    report.cuts = len(cuts)
    report.nodes = nodes
    report.wall_time = budget.elapsed()
    if best_y is not None:
        report.y = problem.canonical(best_y)
        report.robustness_cost = int(best_r)
        if report.y is not best_y and not np.array_equal(report.y, best_y):
            report.robustness_cost = min(int(best_r), robustness_cost(report.y, problem))
    report.lower_bound = min(best_lb, float(best_r)) if math.isfinite(best_lb) else -math.inf
    if report.status == "Proved":
        report.lower_bound = float(report.robustness_cost)
    return report


def lph(problem: RobustProblem, time_limit: float = math.inf) -> SolveReport:
    """LP-dual heuristic: solve the single-level MILP, then evaluate its ``y`` exactly."""
    budget = Budget(time_limit)
    mip, y_idx = problem.heuristic_mip()
    res = solve_milp(mip, budget.remaining())
    report = SolveReport("LPH", None, None, status="HeuristicUB", nodes=res.nodes)
    if res.status == "Infeasible":
        raise InfeasibleProblem("heuristic model infeasible")
    if res.x is None:
        report.status = "TimedOut"
        report.wall_time = budget.elapsed()
        return report
    report.heuristic_objective = float(res.objective)
    y = problem.canonical(np.round(res.x[np.asarray(y_idx)]).astype(np.int64))
    report.y = y
    try:
        report.robustness_cost = robustness_cost(y, problem, budget.remaining())
    except ClassicalSolveTimeout:
        report.status = "TimedOut"
    report.wall_time = budget.elapsed()
    return report


def brute_force_robust(problem: RobustProblem, cap: int = 100_000) -> SolveReport:
    """Evaluate every feasible solution exactly; return the first minimizer."""
    start = time.monotonic()
    best_y = None
    best_r = math.inf
    count = 0
    for y in problem.enumerate_feasible(cap):
        count += 1
        r = robustness_cost(y, problem)
        if r < best_r:
            best_r, best_y = r, np.asarray(y, dtype=np.int64)
    if best_y is None:
        raise InfeasibleProblem("no feasible solution")
    return SolveReport(
        "BruteForce",
        best_y,
        int(best_r),
        lower_bound=float(best_r),
        iterations=count,
        wall_time=time.monotonic() - start,
        status="Proved",
    )


__all__ = [
    "Budget",
    "CapExceeded",
    "FeasibilityRows",
    "IntervalCostVector",
    "RobustProblem",
    "Scenario",
    "SolveReport",
    "amu",
    "benders",
    "brute_force_robust",
    "induced_scenario",
    "lph",
    "midpoint_scenario",
    "robustness_cost",
    "worst_case_scenario",
]
