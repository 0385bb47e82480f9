"""Randomized oracle verification on tiny instances of both problems.

Every check compares an algorithm against exhaustive enumeration. A violated
check records the offending instance in its text format so it can be replayed
with ``regret-kit solve``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import RobustProblem, amu, benders, brute_force_robust, lph, robustness_cost
from .lp import EPS_DUAL, solve_milp
from .rng import Xoshiro256
from .rrsp import (
    IntervalDigraph,
    RRSPProblem,
    build_i1,
    classical_rsp,
    enumerate_paths,
    extract_elementary,
    format_rrsp,
    generate_random,
)
from .rsc import RSCProblem, classical_sc, format_rsc, generate_beasley, generate_kz, generate_montemanni, synthetic_structure

MAX_EXTREME_VARS = 12


@dataclass
class Violation:
    check: str
    detail: str
    instance: str

    @property
    def suffix(self) -> str:
        body = [ln for ln in self.instance.splitlines() if ln and not ln.startswith("#")]
        return ".rrsp" if body and body[0].startswith("rrsp") else ".rsc"


@dataclass
class VerifyReport:
    trials: int = 0
    passed: dict[str, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, check: str, ok: bool, detail: str, instance_text: str) -> None:
        if ok:
            self.passed[check] = self.passed.get(check, 0) + 1
        else:
            self.violations.append(Violation(check, detail, instance_text))

    def render(self) -> str:
        lines = [f"trials: {self.trials}"]
        if self.trials == 0:
            lines.append("WARNING: 0 trials run, nothing was checked")
        for check in sorted(set(self.passed) | {v.check for v in self.violations}):
            bad = sum(v.check == check for v in self.violations)
            lines.append(f"{'FAIL' if bad else 'ok  '} {check}: {self.passed.get(check, 0)} passed, {bad} failed")
        return "\n".join(lines)


def feasible_matrix(problem: RobustProblem, cap: int = 100_000) -> np.ndarray:
    sols = list(problem.enumerate_feasible(cap))
    return np.array(sols, dtype=np.int64).reshape(len(sols), problem.intervals().n)


def extreme_max_regret(problem: RobustProblem, y: np.ndarray, feasible: np.ndarray | None = None) -> int:
    """Maximum regret of ``y`` over all ``2^n`` extreme scenarios, by enumeration.

    Scenario optima come from a min over the enumerated feasible set, so this
    oracle shares no code with the classical solvers.
    """
    iv = problem.intervals()
    if iv.n > MAX_EXTREME_VARS:
        raise ValueError(f"{iv.n} variables is too many for extreme-scenario enumeration")
    F = feasible_matrix(problem) if feasible is None else feasible
    picks = np.array(list(itertools.product((0, 1), repeat=iv.n)), dtype=np.int64)
    C = np.where(picks == 1, iv.u, iv.l)
    opt = (C @ F.T).min(axis=1)
    return int((C @ np.asarray(y, dtype=np.int64) - opt).max())


def simple_cycles(g: IntervalDigraph, limit: int = 200) -> list[tuple[int, ...]]:
    """Arc sequences of simple directed cycles, each rooted at its smallest vertex."""
    out: list[tuple[int, ...]] = []
    for root in range(g.n_vertices):
        stack: list[int] = []
        seen = {root}

        def rec(v: int) -> None:
            for a in g.out_arcs(v):
                if len(out) >= limit:
                    return
                w = int(g.head[a])
                if w == root:
                    out.append(tuple(stack + [a]))
                elif w > root and w not in seen:
                    seen.add(w)
                    stack.append(a)
                    rec(w)
                    stack.pop()
                    seen.discard(w)

        rec(root)
    return out


def non_elementary_flows(g: IntervalDigraph, limit: int = 50) -> list[np.ndarray]:
    """Elementary paths joined with an arc-disjoint simple cycle (touching or not)."""
    flows = []
    seen: set[bytes] = set()
    cycles = simple_cycles(g)
    for p in enumerate_paths(g, cap=10_000, respect_beta=False):
        for cyc in cycles:
            if set(cyc) & set(p.arcs):
                continue
            y = p.vector(g.n_arcs)
            y[list(cyc)] = 1
            key = y.tobytes()
            if key not in seen:
                seen.add(key)
                flows.append(y)
            if len(flows) >= limit:
                return flows
    return flows


def _check_common(problem: RobustProblem, text: str, rep: VerifyReport, rng: Xoshiro256, time_limit: float) -> None:
    bf = brute_force_robust(problem)
    opt = bf.robustness_cost
    b = benders(problem, time_limit)
    rep.record(
        "benders == brute",
        b.status == "Proved" and b.robustness_cost == opt,
        f"benders {b.status} {b.robustness_cost} vs brute {opt}",
        text,
    )
    mono = all(x <= y + 1e-9 for x, y in zip(b.lb_history, b.lb_history[1:]))
    rep.record("benders lb nondecreasing", mono, f"lb history {b.lb_history}", text)
    a = amu(problem, time_limit)
    rep.record("opt <= amu <= 2 opt", opt <= a.robustness_cost <= 2 * opt, f"amu {a.robustness_cost} opt {opt}", text)
    h = lph(problem, time_limit)
    sandwich = (
        h.robustness_cost is not None
        and opt <= h.robustness_cost
        and h.robustness_cost <= h.heuristic_objective + EPS_DUAL * (1 + abs(h.heuristic_objective))
    )
    rep.record(
        "opt <= lph <= heuristic objective",
        sandwich,
        f"opt {opt} lph {h.robustness_cost} heuristic {h.heuristic_objective}",
        text,
    )
    if problem.intervals().n <= MAX_EXTREME_VARS:
        F = feasible_matrix(problem)
        for k in _sample(rng, len(F), 5):
            y = F[k]
            ext = extreme_max_regret(problem, y, F)
            ind = robustness_cost(y, problem)
            rep.record("induced scenario is worst", ext == ind, f"y {y.tolist()} extreme {ext} induced {ind}", text)


def _sample(rng: Xoshiro256, n: int, k: int) -> list[int]:
    idx = list(range(n))
    for i in range(min(k, n)):
        j = rng.randint(i, n - 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx[: min(k, n)]


def verify_rrsp_instance(g: IntervalDigraph, rep: VerifyReport, rng: Xoshiro256, time_limit: float = 60.0) -> None:
    text = format_rrsp(g)
    problem = RRSPProblem(g)
    _check_common(problem, text, rep, rng, time_limit)
    c = np.array([rng.randint(int(lo), int(hi)) for lo, hi in zip(g.l, g.u)], dtype=float)
    _, dp = classical_rsp(g, c)
    mip = solve_milp(build_i1(g, c))
    rep.record("classical_rsp == I1", abs(dp - mip.objective) <= 1e-6, f"dp {dp} milp {mip.objective}", text)
    # cycles must fit the resource limit to stay feasible flows
    loose = g.with_beta(int(g.d.sum()))
    loose_problem = RRSPProblem(loose)
    for y in non_elementary_flows(loose)[:3]:
        p = extract_elementary(loose, y)
        r_in = robustness_cost(y, loose_problem)
        r_out = robustness_cost(p.vector(loose.n_arcs), loose_problem)
        rep.record("elementary extraction keeps regret", r_out <= r_in, f"flow {y.tolist()} {r_in} -> {r_out}", format_rrsp(loose))


def verify_rsc_instance(p, rep: VerifyReport, rng: Xoshiro256, time_limit: float = 60.0) -> None:
    text = format_rsc(p)
    problem = RSCProblem(p)
    _check_common(problem, text, rep, rng, time_limit)
    c = np.array([rng.randint(int(lo), int(hi)) for lo, hi in zip(p.l, p.u)], dtype=float)
    _, cost = classical_sc(p, c)
    F = feasible_matrix(problem)
    rep.record("classical_sc == enumeration", abs(cost - float((F @ c).min())) <= 1e-6, f"{cost}", text)


def random_rrsp(rng: Xoshiro256, max_vertices: int = 8, max_arcs: int = 12) -> IntervalDigraph:
    n = rng.randint(3, max_vertices)
    extra = rng.randint(1, max(1, max_arcs - (n - 1)))
    return generate_random(n, extra, rng.next_u64(), beta_slack=1.0 + rng.randint(0, 10) / 10)


def random_rsc(rng: Xoshiro256, max_cols: int = 8):
    cols = rng.randint(2, max_cols)
    rows = rng.randint(2, 6)
    struct = synthetic_structure(rows, cols, 0.4, rng.next_u64(), max_cost=20, name=f"S{rows}x{cols}")
    kind = rng.randint(0, 2)
    seed = rng.next_u64()
    if kind == 0:
        return generate_beasley(struct, 0.5, seed)
    if kind == 1:
        return generate_montemanni(struct, seed)
    return generate_kz(struct, seed)


def run_verify(
    trials: int = 100,
    seed: int = 0,
    max_vertices: int = 8,
    max_cols: int = 8,
    time_limit: float = 60.0,
    dump_dir: str | Path | None = None,
) -> VerifyReport:
    """``trials`` random instances of each problem through every oracle check."""
    if trials < 0:
        raise ValueError("trials must be >= 0")
    rep = VerifyReport(trials=trials)
    if trials == 0:
        warnings.warn("0 trials requested: verification is vacuous", stacklevel=2)
    rng = Xoshiro256(seed)
    for _ in range(trials):
        verify_rrsp_instance(random_rrsp(rng, max_vertices), rep, rng, time_limit)
        verify_rsc_instance(random_rsc(rng, max_cols), rep, rng, time_limit)
    if dump_dir is not None and rep.violations:
        d = Path(dump_dir)
        d.mkdir(parents=True, exist_ok=True)
        for k, v in enumerate(rep.violations):
            (d / f"counterexample_{k}{v.suffix}").write_text(f"# check: {v.check}\n# detail: {v.detail}\n" + v.instance)
    return rep

