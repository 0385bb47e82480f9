"""Random model generators and optimality checks shared by the LP tests."""

from __future__ import annotations

import itertools
import math

import numpy as np

from regret_kit.lp import LinearProgram, MixedIntegerProgram


def random_feasible_lp(rng: np.random.Generator, max_m: int = 7, max_n: int = 7) -> LinearProgram:
    """Mixed relations and bound patterns, feasible by construction around a hidden point."""
    m, n = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_n + 1))
    kind = rng.choice(["box", "lower", "upper", "free"], n, p=[0.5, 0.25, 0.1, 0.15])
    lb = np.where((kind == "box") | (kind == "lower"), rng.integers(-4, 3, n), -np.inf).astype(float)
    ub = np.full(n, np.inf)
    box = kind == "box"
    ub[box] = lb[box] + rng.integers(0, 6, box.sum())
    ub[kind == "upper"] = rng.integers(-3, 4, (kind == "upper").sum())
    x0 = np.where(np.isfinite(lb), lb, np.where(np.isfinite(ub), ub, 0.0)) + rng.integers(0, 3, n)
    x0 = np.minimum(x0, ub)
    A = rng.integers(-4, 5, (m, n)).astype(float)
    A[rng.random((m, n)) < 0.25] = 0.0
    rels = tuple(rng.choice(["<=", ">=", "="], m, p=[0.45, 0.35, 0.2]))
    act = A @ x0
    slack = rng.integers(0, 4, m)
    b = np.array([act[i] + slack[i] if r == "<=" else act[i] - slack[i] if r == ">=" else act[i] for i, r in enumerate(rels)])
    c = rng.integers(-5, 6, n).astype(float)
    return LinearProgram(c, A, rels, b, lb, ub, "min" if rng.random() < 0.6 else "max")


def complementary_slackness_gap(lp: LinearProgram, x: np.ndarray, duals: np.ndarray, reduced: np.ndarray) -> float:
    """Largest violated product of a multiplier and its slack (0 at a KKT point)."""
    worst = 0.0
    act = lp.A @ x
    sgn = 1.0 if lp.sense == "min" else -1.0
    for i, rel in enumerate(lp.relations):
        y = sgn * duals[i]
        if rel == ">=" and y < -1e-7 or rel == "<=" and y > 1e-7:
            return math.inf  # wrong dual sign
        worst = max(worst, abs(y * (act[i] - lp.b[i])))
    for j in range(lp.n_vars):
        d = sgn * reduced[j]
        if d > 1e-7:
            if not math.isfinite(lp.lb[j]):
                return math.inf
            worst = max(worst, d * (x[j] - lp.lb[j]))
        elif d < -1e-7:
            if not math.isfinite(lp.ub[j]):
                return math.inf
            worst = max(worst, -d * (lp.ub[j] - x[j]))
    return worst


def random_binary_mip(rng: np.random.Generator, max_n: int = 12) -> MixedIntegerProgram:
    n, m = int(rng.integers(2, max_n + 1)), int(rng.integers(1, 6))
    A = rng.integers(-5, 8, (m, n)).astype(float)
    rels = tuple(rng.choice(["<=", ">=", "="], m, p=[0.6, 0.3, 0.1]))
    ref = rng.integers(0, 2, n)
    act = A @ ref
    b = np.array([act[i] + rng.integers(0, 5) if r == "<=" else act[i] - rng.integers(0, 5) if r == ">=" else act[i] for i, r in enumerate(rels)])
    if rng.random() < 0.1:
        b = b + np.where(np.array(rels) == ">=", 50, -50)  # usually infeasible
    c = rng.integers(-9, 10, n).astype(float)
    lp = LinearProgram(c, A, rels, b, 0.0, 1.0, "min" if rng.random() < 0.5 else "max")
    return MixedIntegerProgram(lp, tuple(range(n)))


def enumerate_binary_optimum(mip: MixedIntegerProgram) -> float | None:
    lp = mip.lp
    X = np.array(list(itertools.product((0, 1), repeat=lp.n_vars)), dtype=float)
    act = X @ lp.A.T
    ok = np.ones(len(X), dtype=bool)
    for i, rel in enumerate(lp.relations):
        if rel == "<=":
            ok &= act[:, i] <= lp.b[i] + 1e-9
        elif rel == ">=":
            ok &= act[:, i] >= lp.b[i] - 1e-9
        else:
            ok &= np.abs(act[:, i] - lp.b[i]) <= 1e-9
    if not ok.any():
        return None
    vals = X[ok] @ lp.c
    return float(vals.min() if lp.sense == "min" else vals.max())
