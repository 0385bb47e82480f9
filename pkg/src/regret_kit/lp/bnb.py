"""Best-first 0-1 branch-and-bound over LP relaxations."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections import OrderedDict

import numpy as np

from .model import EPS_GAP, EPS_INT, MilpResult, MixedIntegerProgram, SolverTimeout
from .simplex import SimplexModel, WarmStart

# parent tableaus kept for child re-solves, oldest evicted first
TABLEAU_CACHE_BYTES = 256 * 2**20


def solve_milp(
    mip: MixedIntegerProgram,
    time_limit: float = math.inf,
    *,
    incumbent: np.ndarray | None = None,
    node_limit: int | None = None,
    integral_objective: bool = False,
    pivot_rule: str = "dantzig",
) -> MilpResult:
    """Solve a 0-1 MILP.

    Nodes are explored best bound first, deeper nodes first on ties; the
    branching variable is the most fractional binary, lowest index on ties.
    Fixings are applied through variable bounds and each child LP is
    re-solved with dual simplex pivots from its parent's optimal basis.

    ``incumbent`` seeds the upper bound with a feasible point (it is checked
    and ignored when infeasible). With ``integral_objective`` every feasible
    objective value is known to be an integer, so nodes whose bound cannot
    beat ``incumbent - 1`` are pruned.
    """
    if time_limit <= 0:
        raise ValueError("time_limit must be positive")
    lp = mip.lp
    sign = 1.0 if lp.sense == "min" else -1.0
    start = time.monotonic()
    deadline = start + time_limit if math.isfinite(time_limit) else None
    binaries = np.asarray(mip.binaries, dtype=int)

    best_x: np.ndarray | None = None
    best_val = math.inf  # internal values are always minimized
    if incumbent is not None:
        cand = np.asarray(incumbent, dtype=float)
        if cand.shape == (lp.n_vars,) and mip.is_integral(cand) and lp.max_violation(cand) <= 1e-6:
            best_x = cand.copy()
            best_x[binaries] = np.round(best_x[binaries])
            best_val = sign * lp.objective_value(best_x)

    def prune_at() -> float:
        if integral_objective and math.isfinite(best_val):
            return best_val - 1.0 + EPS_GAP
        return best_val - EPS_GAP

    counter = itertools.count()
    nodes = 0
    lp_iters = 0
    root_lb = lp.lb.copy()
    root_ub = lp.ub.copy()
    model = SimplexModel(lp, pivot_rule)
    tableaus: OrderedDict[int, WarmStart] = OrderedDict()
    cached_bytes = 0
    pending: dict[int, int] = {}
    heap: list[tuple[float, int, int, np.ndarray, np.ndarray, int, WarmStart | None]] = []
    heapq.heappush(heap, (-math.inf, 0, next(counter), root_lb, root_ub, -1, None))
    timed_out = False
    root_bound = -math.inf

    while heap:
        bound, negdepth, _, lo, hi, parent, basis = heap[0]
        if bound >= prune_at():
            heapq.heappop(heap)
            continue
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        if node_limit is not None and nodes >= node_limit:
            break
        entry = heapq.heappop(heap)
        nodes += 1
        warm = tableaus.get(parent, basis)
        if parent in tableaus:
            pending[parent] -= 1
            if pending[parent] == 0:
                cached_bytes -= tableaus.pop(parent).nbytes
        try:
            sol, ws = model.solve(lo, hi, warm=warm, deadline=deadline, keep_tableau=True)
        except SolverTimeout:
            heapq.heappush(heap, entry)
            timed_out = True
            break
        lp_iters += sol.iterations
        if sol.status == "Unbounded":
            if nodes == 1:
                return MilpResult("Unbounded", None, -sign * math.inf, -sign * math.inf, nodes, lp.sense, lp_iters)
            continue
        if sol.status != "Optimal":
            continue
        val = sign * sol.objective
        if nodes == 1:
            root_bound = val
        if val >= prune_at():
            continue
        x = sol.x
        frac = np.abs(x[binaries] - np.round(x[binaries])) if binaries.size else np.zeros(0)
        if frac.size == 0 or frac.max() <= EPS_INT:
            xi = x.copy()
            if binaries.size:
                xi[binaries] = np.round(xi[binaries])
            best_x = xi
            best_val = sign * lp.objective_value(xi)
            continue
        # most fractional: distance to 0.5 smallest; argmin picks lowest index on ties
        dist = np.abs(x[binaries] - np.floor(x[binaries]) - 0.5)
        dist[frac <= EPS_INT] = np.inf
        j = int(binaries[int(np.argmin(dist))])
        depth = -negdepth + 1
        node_id = next(counter)
        child_basis = None
        if ws is not None:
            child_basis = ws.without_tableau()
            if ws.nbytes <= TABLEAU_CACHE_BYTES:
                tableaus[node_id] = ws
                pending[node_id] = 2
                cached_bytes += ws.nbytes
                while cached_bytes > TABLEAU_CACHE_BYTES:
                    cached_bytes -= tableaus.popitem(last=False)[1].nbytes
        for v in (0.0, 1.0):
            clo, chi = lo.copy(), hi.copy()
            clo[j] = chi[j] = v
            heapq.heappush(heap, (val, -depth, next(counter), clo, chi, node_id, child_basis))

    open_bound = min((h[0] for h in heap), default=math.inf)
    if timed_out or (node_limit is not None and heap):
        lb_int = min(open_bound, best_val)
        if lb_int == -math.inf:
            lb_int = root_bound
        status = "TimedOut" if timed_out else "Feasible"
        return MilpResult(
            status,
            best_x,
            sign * best_val if best_x is not None else sign * math.inf,
            sign * lb_int,
            nodes,
            lp.sense,
            lp_iters,
        )
    if best_x is None:
        return MilpResult("Infeasible", None, sign * math.inf, sign * math.inf, nodes, lp.sense, lp_iters)
    return MilpResult("Optimal", best_x, sign * best_val, sign * best_val, nodes, lp.sense, lp_iters)
