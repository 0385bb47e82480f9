"""Restricted robust shortest path (R-RSP).

Digraph model with interval arc costs and integer resource consumption, the
exact resource-constrained shortest path solver used as the classical
counterpart, the flow (I1) and heuristic (H1) MILP builders, instance
generators and the line-oriented ``.rrsp`` text format.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import FeasibilityRows, IntervalCostVector, RobustProblem, Scenario
from .errors import BadShape, CapExceeded, ClassicalSolveTimeout, InfeasibleProblem, ParseError
from .lp import LinearProgram, MixedIntegerProgram
from .rng import Xoshiro256


class NotAFlow(ValueError):
    """Arc set violates unit o-t flow conservation."""


class Disconnected(InfeasibleProblem):
    pass


@dataclass(frozen=True, eq=False)
class IntervalDigraph:
    """Digraph with per-arc ``(tail, head, l, u, d)``; arc index = variable index."""

    n_vertices: int
    tail: np.ndarray
    head: np.ndarray
    l: np.ndarray
    u: np.ndarray
    d: np.ndarray
    origin: int
    dest: int
    beta: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        arrays = {}
        for key in ("tail", "head", "l", "u", "d"):
            a = np.asarray(getattr(self, key), dtype=np.int64).reshape(-1)
            a.setflags(write=False)
            arrays[key] = a
            object.__setattr__(self, key, a)
        n_arcs = arrays["tail"].size
        if any(a.size != n_arcs for a in arrays.values()):
            raise ValueError("arc arrays differ in length")
        if self.origin == self.dest:
            raise ValueError("origin and destination must differ")
        for v in (self.origin, self.dest):
            if not 0 <= v < self.n_vertices:
                raise ValueError(f"vertex {v} out of range")
        if n_arcs and (
            arrays["tail"].min() < 0
            or arrays["head"].min() < 0
            or arrays["tail"].max() >= self.n_vertices
            or arrays["head"].max() >= self.n_vertices
        ):
            raise ValueError("arc endpoint out of range")
        if np.any(arrays["l"] < 0) or np.any(arrays["l"] > arrays["u"]) or np.any(arrays["d"] < 0):
            raise ValueError("need 0 <= l <= u and d >= 0 on every arc")
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for a, t in enumerate(arrays["tail"].tolist()):
            out[t].append(a)
        object.__setattr__(self, "_out", tuple(tuple(x) for x in out))

    @property
    def n_arcs(self) -> int:
        return self.tail.size

    def out_arcs(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def intervals(self) -> IntervalCostVector:
        return IntervalCostVector(self.l, self.u)

    def with_beta(self, beta: int) -> "IntervalDigraph":
        return IntervalDigraph(
            self.n_vertices, self.tail, self.head, self.l, self.u, self.d, self.origin, self.dest, int(beta), self.name
        )


@dataclass(frozen=True)
class Path:
    """Ordered arc-index sequence from origin to destination."""

    arcs: tuple[int, ...]

    def vector(self, n_arcs: int) -> np.ndarray:
        y = np.zeros(n_arcs, dtype=np.int64)
        y[list(self.arcs)] = 1
        return y

    def cost(self, costs: Sequence[float]) -> float:
        return float(sum(costs[a] for a in self.arcs))

    def resource(self, g: IntervalDigraph) -> int:
        return int(sum(int(g.d[a]) for a in self.arcs))

    def vertices(self, g: IntervalDigraph) -> list[int]:
        if not self.arcs:
            return [g.origin]
        return [int(g.tail[self.arcs[0]])] + [int(g.head[a]) for a in self.arcs]

    def is_elementary(self, g: IntervalDigraph) -> bool:
        vs = self.vertices(g)
        return len(vs) == len(set(vs))

    def is_valid(self, g: IntervalDigraph) -> bool:
        if not self.arcs or g.tail[self.arcs[0]] != g.origin or g.head[self.arcs[-1]] != g.dest:
            return False
        return all(g.head[a] == g.tail[b] for a, b in zip(self.arcs, self.arcs[1:]))


def classical_rsp(g: IntervalDigraph, scenario, time_limit: float = math.inf) -> tuple[Path, float]:
    """Exact beta-restricted shortest path by label setting.

    Labels ``(cost, resource)`` are settled in increasing ``(cost, resource,
    arc sequence)`` order. Because settled costs never decrease, a label is
    dominated exactly when its vertex already holds a settled label with no
    more resource, so a per-vertex minimum resource is the whole Pareto test.
    Ties resolve to the lexicographically smallest arc sequence.
    """
    costs = np.asarray(scenario.c if isinstance(scenario, Scenario) else scenario, dtype=float)
    if costs.size != g.n_arcs:
        raise ValueError(f"scenario has {costs.size} costs for {g.n_arcs} arcs")
    if np.any(costs < 0):
        raise ValueError("label setting needs nonnegative costs")
    deadline = time.monotonic() + time_limit if math.isfinite(time_limit) else None
    beta = g.beta
    d = g.d.tolist()
    c = costs.tolist()
    head = g.head.tolist()
    settled_res = [math.inf] * g.n_vertices
    heap: list[tuple[float, int, tuple[int, ...], int]] = [(0.0, 0, (), g.origin)]
    pops = 0
    while heap:
        cost, res, arcs, v = heapq.heappop(heap)
        pops += 1
        if deadline is not None and pops % 2048 == 0 and time.monotonic() > deadline:
            raise ClassicalSolveTimeout("restricted shortest path timed out")
        if settled_res[v] <= res:
            continue
        settled_res[v] = res
        if v == g.dest:
            return Path(arcs), cost
        for a in g.out_arcs(v):
            r2 = res + d[a]
            w = head[a]
            if r2 > beta or settled_res[w] <= r2:
                continue
            heapq.heappush(heap, (cost + c[a], r2, arcs + (a,), w))
    raise InfeasibleProblem(f"no origin-destination path with resource <= {beta}")


def compute_beta(g: IntervalDigraph) -> int:
    """``floor(1.1 * D)`` with ``D`` the minimum path resource, in integer arithmetic."""
    return (11 * min_resource(g)) // 10


def _flow_rows(g: IntervalDigraph, width: int) -> tuple[np.ndarray, list[str], np.ndarray]:
    """Flow conservation (in - out = -1 / 0 / +1) plus the resource row."""
    V, A = g.n_vertices, g.n_arcs
    M = np.zeros((V + 1, width))
    M[g.head, np.arange(A)] += 1.0
    M[g.tail, np.arange(A)] -= 1.0
    M[V, :A] = g.d
    b = np.zeros(V + 1)
    b[g.origin] = -1.0
    b[g.dest] = 1.0
    b[V] = g.beta
    return M, ["="] * V + ["<="], b


def build_i1(g: IntervalDigraph, scenario) -> MixedIntegerProgram:
    """Flow formulation of the classical problem in one scenario."""
    costs = np.asarray(scenario.c if isinstance(scenario, Scenario) else scenario, dtype=float)
    M, rel, b = _flow_rows(g, g.n_arcs)
    lp = LinearProgram(costs, M, tuple(rel), b, np.zeros(g.n_arcs), np.ones(g.n_arcs))
    return MixedIntegerProgram(lp, tuple(range(g.n_arcs)))


def build_l1(g: IntervalDigraph, scenario) -> LinearProgram:
    """LP relaxation of :func:`build_i1` without the redundant ``x <= 1`` bounds."""
    costs = np.asarray(scenario.c if isinstance(scenario, Scenario) else scenario, dtype=float)
    M, rel, b = _flow_rows(g, g.n_arcs)
    return LinearProgram(costs, M, tuple(rel), b, np.zeros(g.n_arcs), np.full(g.n_arcs, math.inf))


def build_h1(g: IntervalDigraph) -> tuple[MixedIntegerProgram, np.ndarray]:
    """Heuristic MILP: binary arc choice ``y`` coupled to the dual of the flow LP.

    Columns are ``y`` (one per arc), then a free potential per vertex, then
    the resource multiplier ``mu >= 0``. Objective:
    ``sum u y - pi_t + pi_o + beta mu``; each arc contributes
    ``pi_head - pi_tail - (u - l) y - d mu <= l``.
    """
    V, A = g.n_vertices, g.n_arcs
    width = A + V + 1
    M, rel, b = _flow_rows(g, width)
    coupling = np.zeros((A, width))
    idx = np.arange(A)
    coupling[idx, A + g.head] += 1.0
    coupling[idx, A + g.tail] -= 1.0
    coupling[idx, idx] = -(g.u - g.l)
    coupling[idx, A + V] = -g.d
    Afull = np.vstack([M, coupling])
    bfull = np.concatenate([b, g.l.astype(float)])
    rels = tuple(rel) + ("<=",) * A
    c = np.zeros(width)
    c[:A] = g.u
    c[A + g.dest] -= 1.0
    c[A + g.origin] += 1.0
    c[A + V] = g.beta
    lb = np.concatenate([np.zeros(A), np.full(V, -math.inf), [0.0]])
    ub = np.concatenate([np.ones(A), np.full(V, math.inf), [math.inf]])
    names = [f"y{a}" for a in range(A)] + [f"pi{v}" for v in range(V)] + ["mu"]
    lp = LinearProgram(c, Afull, rels, bfull, lb, ub, names=tuple(names))
    return MixedIntegerProgram(lp, tuple(range(A))), np.arange(A)


def extract_elementary(g: IntervalDigraph, p) -> Path:
    """Elementary origin-destination path using only arcs of ``p``.

    ``p`` is a :class:`Path` (possibly revisiting vertices) or a 0-1 flow
    vector that may also carry cycles. The returned path is found by
    breadth-first search inside the arc subgraph, scanning arcs by index.
    """
    if isinstance(p, Path):
        if not p.is_valid(g):
            raise NotAFlow("arc sequence is not an origin-destination walk")
        if len(set(p.arcs)) != len(p.arcs):
            raise NotAFlow("walk repeats an arc")
        if p.is_elementary(g):
            return p
        chosen = sorted(set(p.arcs))
    else:
        y = np.asarray(p)
        if y.shape != (g.n_arcs,) or np.any((y != 0) & (y != 1)):
            raise NotAFlow("flow vector must be 0-1 over the arcs")
        balance = np.zeros(g.n_vertices, dtype=np.int64)
        np.add.at(balance, g.head, y)
        np.add.at(balance, g.tail, -y)
        expect = np.zeros(g.n_vertices, dtype=np.int64)
        expect[g.origin] = -1
        expect[g.dest] = 1
        if not np.array_equal(balance, expect):
            raise NotAFlow("flow conservation violated")
        chosen = np.nonzero(y)[0].tolist()
    out: dict[int, list[int]] = {}
    for a in chosen:
        out.setdefault(int(g.tail[a]), []).append(a)
    parent: dict[int, int] = {g.origin: -1}
    queue = deque([g.origin])
    while queue:
        v = queue.popleft()
        if v == g.dest:
            break
        for a in out.get(v, ()):
            w = int(g.head[a])
            if w not in parent:
                parent[w] = a
                queue.append(w)
    if g.dest not in parent:
        raise NotAFlow("destination not reachable inside the arc set")
    arcs = []
    v = g.dest
    while v != g.origin:
        a = parent[v]
        arcs.append(a)
        v = int(g.tail[a])
    return Path(tuple(reversed(arcs)))


def enumerate_paths(g: IntervalDigraph, cap: int = 100_000, respect_beta: bool = True) -> Iterator[Path]:
    """All elementary origin-destination paths (within beta), depth first by arc index."""
    count = 0
    on_path = [False] * g.n_vertices
    stack: list[int] = []

    def rec(v: int, res: int):
        nonlocal count
        if v == g.dest:
            count += 1
            if count > cap:
                raise CapExceeded(f"more than {cap} paths")
            yield Path(tuple(stack))
            return
        on_path[v] = True
        for a in g.out_arcs(v):
            w = int(g.head[a])
            r2 = res + int(g.d[a])
            if on_path[w] or (respect_beta and r2 > g.beta):
                continue
            stack.append(a)
            yield from rec(w, r2)
            stack.pop()
        on_path[v] = False

    yield from rec(g.origin, 0)


class RRSPProblem(RobustProblem):
    def __init__(self, graph: IntervalDigraph):
        self.graph = graph
        self._iv = graph.intervals()
        M, rel, b = _flow_rows(graph, graph.n_arcs)
        self._rows = FeasibilityRows(M, tuple(rel), b)

    def intervals(self) -> IntervalCostVector:
        return self._iv

    def solve_classical(self, scenario: Scenario, time_limit: float = math.inf) -> tuple[np.ndarray, float]:
        path, cost = classical_rsp(self.graph, scenario, time_limit)
        return path.vector(self.graph.n_arcs), cost

    def feasibility_mip(self) -> FeasibilityRows:
        return self._rows

    def heuristic_mip(self) -> tuple[MixedIntegerProgram, np.ndarray]:
        return build_h1(self.graph)

    def enumerate_feasible(self, cap: int) -> Iterator[np.ndarray]:
        for p in enumerate_paths(self.graph, cap):
            yield p.vector(self.graph.n_arcs)

    def canonical(self, y: np.ndarray) -> np.ndarray:
        return extract_elementary(self.graph, y).vector(self.graph.n_arcs)


# ---------------------------------------------------------------- generators


def _fmt(x: float) -> str:
    return format(x, "g")


def _delta(delta: float) -> Fraction:
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    return Fraction(str(delta))


def _draw_interval(rng: Xoshiro256, phi_max: int, delta: Fraction) -> tuple[int, int]:
    phi = rng.randint(1, phi_max)
    lo = math.ceil((1 - delta) * phi)
    hi = math.floor((1 + delta) * phi)
    l = rng.randint(lo, hi)
    u = rng.randint(l, hi)
    return l, u


def karasan_name(v: int, phi_max: int, delta: float, omega: int) -> str:
    return f"K-{v}-{phi_max}-{_fmt(delta)}-{omega}"


def coco_name(n: int, m: int, phi_max: int, delta: float) -> str:
    return f"G-{n}x{m}-{phi_max}-{_fmt(delta)}"


def generate_karasan(v: int, phi_max: int, delta: float, omega: int, seed: int) -> IntervalDigraph:
    """Layered acyclic digraph: ``v / omega`` layers of width ``omega`` between o and t.

    Vertex 0 is the origin, layer vertices are ``1..v`` layer by layer, and
    ``v + 1`` is the destination. Per arc the draws are: base cost, ``l``,
    ``u``, resource.
    """
    if omega < 1 or v < omega or v % omega:
        raise BadShape(f"v={v} is not a positive multiple of omega={omega}")
    if phi_max < 1:
        raise ValueError("phi_max must be >= 1")
    dl = _delta(delta)
    rng = Xoshiro256(seed)
    layers = v // omega
    o, t = 0, v + 1
    layer = lambda b: range(1 + b * omega, 1 + (b + 1) * omega)  # noqa: E731
    pairs = [(o, j) for j in layer(0)]
    for b in range(layers - 1):
        pairs += [(i, j) for i in layer(b) for j in layer(b + 1)]
    pairs += [(i, t) for i in layer(layers - 1)]
    tails, heads, ls, us, ds = [], [], [], [], []
    for i, j in pairs:
        l, u = _draw_interval(rng, phi_max, dl)
        tails.append(i)
        heads.append(j)
        ls.append(l)
        us.append(u)
        ds.append(rng.randint(1, 10))
    g = IntervalDigraph(v + 2, tails, heads, ls, us, ds, o, t, 0, karasan_name(v, phi_max, delta, omega))
    return g.with_beta(compute_beta(g))


def generate_coco(n: int, m: int, phi_max: int, delta: float, seed: int) -> IntervalDigraph:
    """Grid digraph on an ``n x m`` matrix with two opposite arcs per adjacent pair.

    Vertices are numbered row-major; origin is the upper-left cell and
    destination the lower-right one. Both arcs of a pair share one resource
    value, drawn before their two cost intervals.
    """
    if n < 1 or m < 1 or n * m < 2:
        raise BadShape(f"grid {n}x{m} needs at least two cells")
    if phi_max < 1:
        raise ValueError("phi_max must be >= 1")
    dl = _delta(delta)
    rng = Xoshiro256(seed)
    tails, heads, ls, us, ds = [], [], [], [], []
    for r in range(n):
        for col in range(m):
            a = r * m + col
            nbrs = []
            if col + 1 < m:
                nbrs.append(a + 1)
            if r + 1 < n:
                nbrs.append(a + m)
            for b in nbrs:
                dd = rng.randint(1, 10)
                for i, j in ((a, b), (b, a)):
                    l, u = _draw_interval(rng, phi_max, dl)
                    tails.append(i)
                    heads.append(j)
                    ls.append(l)
                    us.append(u)
                    ds.append(dd)
    g = IntervalDigraph(n * m, tails, heads, ls, us, ds, 0, n * m - 1, 0, coco_name(n, m, phi_max, delta))
    return g.with_beta(compute_beta(g))


def generate_random(
    n_vertices: int,
    n_extra_arcs: int,
    seed: int,
    max_cost: int = 10,
    max_resource: int = 5,
    beta_slack: float = 1.5,
) -> IntervalDigraph:
    """Small random digraph for oracle testing; cycles and parallel arcs allowed.

    A Hamiltonian chain ``0 -> 1 -> ... -> n-1`` guarantees a path, the
    origin is 0 and the destination ``n - 1``; ``beta`` is
    ``floor(beta_slack * D_min)``.
    """
    if n_vertices < 2:
        raise BadShape("need at least two vertices")
    rng = Xoshiro256(seed)
    tails, heads = list(range(n_vertices - 1)), list(range(1, n_vertices))
    for _ in range(n_extra_arcs):
        i = rng.randint(0, n_vertices - 1)
        j = rng.randint(0, n_vertices - 2)
        if j >= i:
            j += 1
        tails.append(i)
        heads.append(j)
    ls, us, ds = [], [], []
    for _ in tails:
        l = rng.randint(0, max_cost)
        ls.append(l)
        us.append(rng.randint(l, max_cost + max_cost // 2))
        ds.append(rng.randint(0, max_resource))
    g = IntervalDigraph(n_vertices, tails, heads, ls, us, ds, 0, n_vertices - 1, 0, f"R-{n_vertices}-{len(tails)}")
    return g.with_beta(int(math.floor(beta_slack * min_resource(g))))


def min_resource(g: IntervalDigraph) -> int:
    """Smallest total resource over origin-destination paths."""
    dist = [math.inf] * g.n_vertices
    dist[g.origin] = 0
    heap = [(0, g.origin)]
    while heap:
        dv, v = heapq.heappop(heap)
        if dv > dist[v]:
            continue
        for a in g.out_arcs(v):
            w = int(g.head[a])
            nd = dv + int(g.d[a])
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    if not math.isfinite(dist[g.dest]):
        raise Disconnected("destination unreachable from origin")
    return int(dist[g.dest])


# ---------------------------------------------------------------- text format


def format_rrsp(g: IntervalDigraph, seed: int | None = None) -> str:
    lines = []
    if g.name:
        lines.append(f"# name={g.name}" + (f" seed={seed}" if seed is not None else ""))
    lines.append(f"rrsp {g.n_vertices} {g.n_arcs} {g.origin} {g.dest} {g.beta}")
    for a in range(g.n_arcs):
        lines.append(f"{g.tail[a]} {g.head[a]} {g.l[a]} {g.u[a]} {g.d[a]}")
    return "\n".join(lines) + "\n"


def parse_rrsp(text: str) -> IntervalDigraph:
    name = ""
    header = None
    arcs: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("name="):
                    name = tok[5:]
            continue
        toks = line.split()
        if header is None:
            if toks[0] != "rrsp" or len(toks) != 6:
                raise ParseError("expected header 'rrsp <V> <A> <o> <t> <beta>'", lineno, toks[0])
            header = tuple(_int(t, lineno) for t in toks[1:])
            continue
        if len(toks) != 5:
            raise ParseError("arc line needs 5 integers", lineno, line)
        arcs.append(tuple(_int(t, lineno) for t in toks))
    if header is None:
        raise ParseError("missing header")
    V, A, o, t, beta = header
    if len(arcs) != A:
        raise ParseError(f"header announces {A} arcs, found {len(arcs)}")
    cols = list(zip(*arcs)) if arcs else [(), (), (), (), ()]
    try:
        return IntervalDigraph(V, *cols, o, t, beta, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError("expected an integer", lineno, tok) from None
