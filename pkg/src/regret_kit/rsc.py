"""Robust set covering (RSC).

Cover structures (optionally carrying base column costs), interval cover
problems, the exact classical solver, the heuristic H2 model, the three
interval-cost recipes plus a synthetic structure generator, and the OR-Library
``scp`` and ``.rsc`` text formats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import FeasibilityRows, IntervalCostVector, RobustProblem, Scenario
from .errors import BadShape, CapExceeded, ClassicalSolveTimeout, InfeasibleProblem, ParseError
from .lp import LinearProgram, MixedIntegerProgram, solve_milp
from .rng import Xoshiro256


class CoverageHole(ParseError, InfeasibleProblem):
    """A row that no column covers."""


class MissingBaseCosts(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoverStructure:
    """Incidence of ``n_rows`` rows over ``n_cols`` columns, 0-based internally.

    ``rows[i]`` lists the columns covering row ``i`` (sorted, unique).
    ``base`` holds optional base column costs used by the Beasley recipe.
    """

    n_rows: int
    n_cols: int
    rows: tuple[tuple[int, ...], ...]
    base: np.ndarray | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.n_rows < 1 or self.n_cols < 1:
            raise BadShape("need at least one row and one column")
        rows = tuple(tuple(sorted(set(int(j) for j in r))) for r in self.rows)
        if len(rows) != self.n_rows:
            raise BadShape(f"{len(rows)} row lists for {self.n_rows} rows")
        for i, r in enumerate(rows):
            if not r:
                raise CoverageHole(f"row {i + 1} is covered by no column")
            if r[0] < 0 or r[-1] >= self.n_cols:
                raise BadShape(f"row {i + 1} names a column outside 1..{self.n_cols}")
        object.__setattr__(self, "rows", rows)
        if self.base is not None:
            b = np.asarray(self.base, dtype=np.int64).reshape(-1)
            if b.size != self.n_cols or np.any(b < 0):
                raise BadShape("base costs must be n_cols nonnegative integers")
            b.setflags(write=False)
            object.__setattr__(self, "base", b)
        O = np.zeros((self.n_rows, self.n_cols))
        for i, r in enumerate(rows):
            O[i, list(r)] = 1.0
        O.setflags(write=False)
        object.__setattr__(self, "matrix", O)

    def columns(self) -> list[list[int]]:
        cols: list[list[int]] = [[] for _ in range(self.n_cols)]
        for i, r in enumerate(self.rows):
            for j in r:
                cols[j].append(i)
        return cols

    def covers(self, x: np.ndarray) -> bool:
        return bool(np.all(self.matrix @ np.asarray(x, dtype=float) >= 1))

    def same_incidence(self, other: "CoverStructure") -> bool:
        return (self.n_rows, self.n_cols, self.rows) == (other.n_rows, other.n_cols, other.rows)


@dataclass(frozen=True, eq=False)
class IntervalCoverProblem:
    structure: CoverStructure
    l: np.ndarray
    u: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        iv = IntervalCostVector(self.l, self.u)
        if iv.n != self.structure.n_cols:
            raise BadShape(f"{iv.n} intervals for {self.structure.n_cols} columns")
        object.__setattr__(self, "l", iv.l)
        object.__setattr__(self, "u", iv.u)

    @property
    def n_rows(self) -> int:
        return self.structure.n_rows

    @property
    def n_cols(self) -> int:
        return self.structure.n_cols

    def intervals(self) -> IntervalCostVector:
        return IntervalCostVector(self.l, self.u)


def _as_structure(p) -> CoverStructure:
    return p.structure if isinstance(p, IntervalCoverProblem) else p


def _costs(scenario, n: int) -> np.ndarray:
    c = np.asarray(scenario.c if isinstance(scenario, Scenario) else scenario, dtype=float)
    if c.size != n:
        raise ValueError(f"scenario has {c.size} costs for {n} columns")
    return c


def greedy_cover(struct: CoverStructure, costs: Sequence[float]) -> np.ndarray:
    """Cost-per-newly-covered-row greedy, then drop redundant columns (costliest first)."""
    c = np.asarray(costs, dtype=float)
    cols = struct.columns()
    uncovered = set(range(struct.n_rows))
    x = np.zeros(struct.n_cols, dtype=np.int64)
    while uncovered:
        best, best_ratio = -1, math.inf
        for j in range(struct.n_cols):
            if x[j]:
                continue
            gain = sum(1 for i in cols[j] if i in uncovered)
            if gain and c[j] / gain < best_ratio:
                best, best_ratio = j, c[j] / gain
        x[best] = 1
        uncovered.difference_update(cols[best])
    count = struct.matrix @ x
    for j in sorted(np.nonzero(x)[0], key=lambda j: (-c[j], j)):
        if np.all(count[cols[j]] >= 2):
            x[j] = 0
            count[cols[j]] -= 1
    return x


def build_i2(p, scenario) -> MixedIntegerProgram:
    struct = _as_structure(p)
    c = _costs(scenario, struct.n_cols)
    n = struct.n_cols
    lp = LinearProgram(
        c, struct.matrix, (">=",) * struct.n_rows, np.ones(struct.n_rows), np.zeros(n), np.ones(n)
    )
    return MixedIntegerProgram(lp, tuple(range(n)))


def classical_sc(p, scenario, time_limit: float = math.inf) -> tuple[np.ndarray, float]:
    """Exact minimum-cost cover by branch-and-bound on I2, seeded with the greedy cover."""
    struct = _as_structure(p)
    c = _costs(scenario, struct.n_cols)
    mip = build_i2(struct, c)
    integral = bool(np.all(c == np.round(c)))
    res = solve_milp(mip, time_limit, incumbent=greedy_cover(struct, c), integral_objective=integral)
    if res.status == "TimedOut":
        raise ClassicalSolveTimeout("set covering solve timed out")
    if res.status != "Optimal":
        raise InfeasibleProblem(f"set covering solve ended {res.status}")
    x = np.round(res.x).astype(np.int64)
    return x, float(c @ x)


def build_h2(p: IntervalCoverProblem) -> tuple[MixedIntegerProgram, np.ndarray]:
    """Heuristic MILP over ``(y, lambda)``: ``min u.y - sum lambda``.

    Cover rows keep ``y`` a covering; column ``j`` carries
    ``sum_{i covered by j} lambda_i - (u_j - l_j) y_j <= l_j``.
    """
    I, J = p.n_rows, p.n_cols
    O = p.structure.matrix
    A = np.zeros((I + J, J + I))
    A[:I, :J] = O
    A[I:, J:] = O.T
    A[I + np.arange(J), np.arange(J)] = -(p.u - p.l)
    b = np.concatenate([np.ones(I), p.l.astype(float)])
    rels = (">=",) * I + ("<=",) * J
    c = np.concatenate([p.u.astype(float), -np.ones(I)])
    lb = np.zeros(J + I)
    ub = np.concatenate([np.ones(J), np.full(I, math.inf)])
    names = tuple(f"y{j}" for j in range(J)) + tuple(f"lam{i}" for i in range(I))
    lp = LinearProgram(c, A, rels, b, lb, ub, names=names)
    return MixedIntegerProgram(lp, tuple(range(J))), np.arange(J)


def enumerate_covers(struct: CoverStructure, cap: int = 100_000) -> Iterator[np.ndarray]:
    """Every covering, in binary-counter order over column subsets."""
    n = struct.n_cols
    if n > 62 or (1 << n) > 64 * cap:
        raise CapExceeded(f"2^{n} subsets is too many to enumerate under cap {cap}")
    count = 0
    for bits in itertools.product((0, 1), repeat=n):
        x = np.array(bits[::-1], dtype=np.int64)
        if struct.covers(x):
            count += 1
            if count > cap:
                raise CapExceeded(f"more than {cap} coverings")
            yield x


class RSCProblem(RobustProblem):
    def __init__(self, problem: IntervalCoverProblem):
        self.problem = problem
        self._iv = problem.intervals()
        s = problem.structure
        self._rows = FeasibilityRows(s.matrix, (">=",) * s.n_rows, np.ones(s.n_rows))

    def intervals(self) -> IntervalCostVector:
        return self._iv

    def solve_classical(self, scenario: Scenario, time_limit: float = math.inf) -> tuple[np.ndarray, float]:
        return classical_sc(self.problem, scenario, time_limit)

    def feasibility_mip(self) -> FeasibilityRows:
        return self._rows

    def heuristic_mip(self) -> tuple[MixedIntegerProgram, np.ndarray]:
        return build_h2(self.problem)

    def enumerate_feasible(self, cap: int) -> Iterator[np.ndarray]:
        return enumerate_covers(self.problem.structure, cap)


# ---------------------------------------------------------------- generators


def _set_name(struct: CoverStructure) -> str:
    return struct.name or "synthetic"


def generate_beasley(struct: CoverStructure, delta: float, seed: int) -> IntervalCoverProblem:
    """``l`` in ``[ceil((1-delta) phi), phi]`` then ``u`` in ``[phi, floor((1+delta) phi)]``."""
    if struct.base is None:
        raise MissingBaseCosts("the Beasley recipe needs base column costs")
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    dl = Fraction(str(delta))
    rng = Xoshiro256(seed)
    ls, us = [], []
    for phi in struct.base.tolist():
        ls.append(rng.randint(math.ceil((1 - dl) * phi), phi))
        us.append(rng.randint(phi, math.floor((1 + dl) * phi)))
    return IntervalCoverProblem(struct, ls, us, f"B.{_set_name(struct)}-{delta:g}")


def generate_montemanni(struct: CoverStructure, seed: int) -> IntervalCoverProblem:
    rng = Xoshiro256(seed)
    ls, us = [], []
    for _ in range(struct.n_cols):
        u = rng.randint(0, 1000)
        us.append(u)
        ls.append(rng.randint(0, u))
    return IntervalCoverProblem(struct, ls, us, f"M.{_set_name(struct)}-1000")


def generate_kz(struct: CoverStructure, seed: int) -> IntervalCoverProblem:
    rng = Xoshiro256(seed)
    ls, us = [], []
    for _ in range(struct.n_cols):
        l = rng.randint(0, 1000)
        ls.append(l)
        us.append(rng.randint(l, l + 1000))
    return IntervalCoverProblem(struct, ls, us, f"KZ.{_set_name(struct)}-1000")


def synthetic_structure(
    n_rows: int, n_cols: int, density: float, seed: int, max_cost: int = 100, name: str = ""
) -> CoverStructure:
    """Random incidence with each entry set with probability ``density``.

    A row left empty receives one uniformly drawn column, so every row is
    coverable. Base costs are uniform in ``[1, max_cost]``, drawn after the
    incidence.
    """
    if n_rows < 1 or n_cols < 1:
        raise BadShape("need at least one row and one column")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = Xoshiro256(seed)
    rows = []
    for _ in range(n_rows):
        r = [j for j in range(n_cols) if rng.random() < density]
        if not r:
            r = [rng.randint(0, n_cols - 1)]
        rows.append(r)
    base = [rng.randint(1, max_cost) for _ in range(n_cols)]
    return CoverStructure(n_rows, n_cols, tuple(tuple(r) for r in rows), np.array(base), name or f"S{n_rows}x{n_cols}")


# ---------------------------------------------------------------- file formats


def _tokens(text: str) -> Iterator[tuple[str, int]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        for tok in line.split():
            yield tok, lineno


def _next_int(it, what: str) -> int:
    try:
        tok, lineno = next(it)
    except StopIteration:
        raise ParseError(f"unexpected end of input while reading {what}") from None
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer for {what}", lineno, tok) from None


def parse_orlib(text: str, name: str = "") -> CoverStructure:
    """OR-Library ``scp`` text: ``m n``, ``n`` costs, then per row ``k`` and ``k`` 1-based columns."""
    it = _tokens(text)
    m = _next_int(it, "row count")
    n = _next_int(it, "column count")
    if m < 1 or n < 1:
        raise ParseError(f"bad dimensions {m} x {n}", 1)
    base = [_next_int(it, f"cost of column {j + 1}") for j in range(n)]
    rows = []
    for i in range(m):
        k = _next_int(it, f"cover count of row {i + 1}")
        if k == 0:
            raise CoverageHole(f"row {i + 1} is covered by no column")
        r = []
        for _ in range(k):
            try:
                tok, lineno = next(it)
            except StopIteration:
                raise ParseError(f"unexpected end of input in row {i + 1}") from None
            try:
                j = int(tok)
            except ValueError:
                raise ParseError(f"expected a column index in row {i + 1}", lineno, tok) from None
            if not 1 <= j <= n:
                raise ParseError(f"column index outside 1..{n} in row {i + 1}", lineno, tok)
            r.append(j - 1)
        rows.append(tuple(r))
    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing data after the last row", extra[1], extra[0])
    return CoverStructure(m, n, tuple(rows), np.array(base), name)


def serialize_orlib(struct: CoverStructure) -> str:
    if struct.base is None:
        raise MissingBaseCosts("OR-Library files carry base costs")
    lines = [f"{struct.n_rows} {struct.n_cols}", " ".join(str(c) for c in struct.base.tolist())]
    for r in struct.rows:
        lines.append(" ".join([str(len(r))] + [str(j + 1) for j in r]))
    return "\n".join(lines) + "\n"


def format_rsc(p: IntervalCoverProblem, seed: int | None = None) -> str:
    lines = []
    if p.name:
        lines.append(f"# name={p.name}" + (f" seed={seed}" if seed is not None else ""))
    lines.append(f"rsc {p.n_rows} {p.n_cols}")
    lines += [f"{l} {u}" for l, u in zip(p.l.tolist(), p.u.tolist())]
    for r in p.structure.rows:
        lines.append(" ".join([str(len(r))] + [str(j + 1) for j in r]))
    return "\n".join(lines) + "\n"


def parse_rsc(text: str) -> IntervalCoverProblem:
    name = ""
    body = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("name="):
                    name = tok[5:]
            continue
        if line:
            body.append((lineno, line.split()))
    if not body or body[0][1][0] != "rsc" or len(body[0][1]) != 3:
        where = body[0][0] if body else None
        raise ParseError("expected header 'rsc <rows> <cols>'", where)

    def ints(lineno: int, toks: list[str]) -> list[int]:
        out = []
        for t in toks:
            try:
                out.append(int(t))
            except ValueError:
                raise ParseError("expected an integer", lineno, t) from None
        return out

    m, n = ints(body[0][0], body[0][1][1:])
    if len(body) != 1 + n + m:
        raise ParseError(f"expected {n} interval lines and {m} row lines, found {len(body) - 1} lines")
    ls, us = [], []
    for lineno, toks in body[1 : 1 + n]:
        if len(toks) != 2:
            raise ParseError("interval line needs '<l> <u>'", lineno)
        l, u = ints(lineno, toks)
        ls.append(l)
        us.append(u)
    rows = []
    for lineno, toks in body[1 + n :]:
        vals = ints(lineno, toks)
        if not vals or vals[0] != len(vals) - 1:
            raise ParseError("row line must be '<k>' followed by k columns", lineno)
        if vals[0] == 0:
            raise CoverageHole("row is covered by no column", lineno)
        for t, j in zip(toks[1:], vals[1:]):
            if not 1 <= j <= n:
                raise ParseError(f"column index outside 1..{n}", lineno, t)
        rows.append(tuple(j - 1 for j in vals[1:]))
    try:
        return IntervalCoverProblem(CoverStructure(m, n, tuple(rows)), ls, us, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
