"""Model containers for the LP / 0-1 MILP engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EPS_FEAS = 1e-7
EPS_DUAL = 1e-6
EPS_INT = 1e-6
EPS_GAP = 1e-6

LE, GE, EQ = "<=", ">=", "="
_NORMALIZE = {"<=": LE, "≤": LE, ">=": GE, "≥": GE, "=": EQ, "==": EQ}


class MalformedModel(ValueError):
    """Raised when a model's dimensions or bounds are inconsistent."""


class NumericalFailure(RuntimeError):
    """The simplex iteration guard tripped; indicates a bug, not a model property."""


class SolverTimeout(TimeoutError):
    """A deadline expired inside the engine."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """Dense LP ``min|max c x  s.t.  A_i x (rel_i) b_i,  lb <= x <= ub``.

    Instances are treated as immutable; use :meth:`from_rows` to build one from
    a list of ``(row, relation, rhs)`` triples.
    """

    c: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    sense: str = "min"
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise MalformedModel(f"constraint matrix has shape {A.shape}, expected (m, {n})")
        m = A.shape[0]
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != m:
            raise MalformedModel(f"rhs has length {b.size}, expected {m}")
        if len(self.relations) != m:
            raise MalformedModel(f"{len(self.relations)} relations for {m} rows")
        try:
            rel = tuple(_NORMALIZE[r] for r in self.relations)
        except KeyError as exc:
            raise MalformedModel(f"unknown relation {exc.args[0]!r}") from None
        lb = np.broadcast_to(np.asarray(self.lb, dtype=float), (n,)).copy()
        ub = np.broadcast_to(np.asarray(self.ub, dtype=float), (n,)).copy()
        if np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise MalformedModel("lower bound +inf or upper bound -inf")
        if np.any(lb > ub):
            raise MalformedModel("lower bound exceeds upper bound")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise MalformedModel("non-finite coefficient")
        if self.sense not in ("min", "max"):
            raise MalformedModel(f"sense must be 'min' or 'max', got {self.sense!r}")
        if self.names is not None and len(self.names) != n:
            raise MalformedModel("names length differs from variable count")
        for arr in (c, A, b, lb, ub):
            arr.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)
        object.__setattr__(self, "relations", rel)

    @classmethod
    def from_rows(
        cls,
        objective: Sequence[float],
        constraints: Iterable[tuple[Sequence[float], str, float]] = (),
        lb: float | Sequence[float] = 0.0,
        ub: float | Sequence[float] = math.inf,
        sense: str = "min",
        names: Sequence[str] | None = None,
    ) -> "LinearProgram":
        n = len(objective)
        rows, rels, rhs = [], [], []
        for row, rel, value in constraints:
            if len(row) != n:
                raise MalformedModel(f"constraint row of length {len(row)}, expected {n}")
            rows.append(row)
            rels.append(rel)
            rhs.append(value)
        A = np.array(rows, dtype=float).reshape(len(rows), n)
        return cls(
            c=np.asarray(objective, dtype=float),
            A=A,
            relations=tuple(rels),
            b=np.asarray(rhs, dtype=float),
            lb=np.asarray(lb, dtype=float),
            ub=np.asarray(ub, dtype=float),
            sense=sense,
            names=tuple(names) if names is not None else None,
        )

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def with_bounds(self, lb: np.ndarray, ub: np.ndarray) -> "LinearProgram":
        return LinearProgram(self.c, self.A, self.relations, self.b, lb, ub, self.sense, self.names)

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.c @ x)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.n_rows:
            act = self.A @ x
            for i, rel in enumerate(self.relations):
                if rel == LE:
                    worst = max(worst, act[i] - self.b[i])
                elif rel == GE:
                    worst = max(worst, self.b[i] - act[i])
                else:
                    worst = max(worst, abs(act[i] - self.b[i]))
        worst = max(worst, float(np.max(self.lb - x, initial=0.0)))
        worst = max(worst, float(np.max(x - self.ub, initial=0.0)))
        return worst


@dataclass(frozen=True)
class LpSolution:
    """Result of :func:`solve_lp`.

    ``duals`` holds one multiplier per constraint row. For a minimization the
    dual of a ``>=`` row is nonnegative, of a ``<=`` row nonpositive, of an
    ``=`` row free; maximizations flip both signs. ``reduced_costs`` is
    ``c - A^T duals``.
    """

    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "Optimal"


@dataclass(frozen=True, eq=False)
class MixedIntegerProgram:
    """An LP plus the indices of variables restricted to {0, 1}."""

    lp: LinearProgram
    binaries: tuple[int, ...]

    def __post_init__(self) -> None:
        idx = tuple(sorted(set(int(j) for j in self.binaries)))
        n = self.lp.n_vars
        for j in idx:
            if not 0 <= j < n:
                raise MalformedModel(f"binary index {j} out of range")
            if self.lp.lb[j] < 0 or self.lp.ub[j] > 1:
                raise MalformedModel(f"binary variable {j} must have bounds within [0, 1]")
        object.__setattr__(self, "binaries", idx)

    def is_integral(self, x: np.ndarray, tol: float = EPS_INT) -> bool:
        if not self.binaries:
            return True
        v = x[list(self.binaries)]
        return bool(np.all(np.abs(v - np.round(v)) <= tol))


@dataclass(frozen=True)
class MilpResult:
    """Result of :func:`solve_milp`.

    ``status`` is one of ``Optimal``, ``Feasible`` (node limit hit with an
    incumbent), ``Infeasible``, ``Unbounded`` or ``TimedOut``. ``objective``
    is the incumbent value (``inf`` for minimization when none exists) and
    ``bound`` the best proven dual bound.
    """

    status: str
    x: np.ndarray | None
    objective: float
    bound: float
    nodes: int
    sense: str = "min"
    lp_iterations: int = field(default=0, compare=False)

    @property
    def has_incumbent(self) -> bool:
        return self.x is not None

    @property
    def gap(self) -> float:
        if self.x is None:
            return math.inf
        return abs(self.objective - self.bound)
