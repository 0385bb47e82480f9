import math
import time

import numpy as np
import pytest
from scipy.optimize import linprog

from _cases import complementary_slackness_gap, random_feasible_lp
from regret_kit.lp import (
    LinearProgram,
    MalformedModel,
    SimplexModel,
    SolverTimeout,
    dual_objective,
    solve_lp,
    to_lp_text,
)


def highs(lp: LinearProgram):
    """Reference status and objective from scipy's HiGHS."""
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, rel, v in zip(lp.A, lp.relations, lp.b):
        if rel == "<=":
            A_ub.append(row), b_ub.append(v)
        elif rel == ">=":
            A_ub.append(-row), b_ub.append(-v)
        else:
            A_eq.append(row), b_eq.append(v)
    n = lp.n_vars
    bounds = [(None if math.isinf(lo) else lo, None if math.isinf(hi) else hi) for lo, hi in zip(lp.lb, lp.ub)]
    r = linprog(
        lp.c if lp.sense == "min" else -lp.c,
        A_ub=np.array(A_ub).reshape(-1, n) if A_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(A_eq).reshape(-1, n) if A_eq else None,
        b_eq=b_eq or None,
        bounds=bounds,
        method="highs",
    )
    status = {0: "Optimal", 2: "Infeasible", 3: "Unbounded"}[r.status]
    return status, (r.fun if lp.sense == "min" else -r.fun) if r.status == 0 else None


def test_textbook_max():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    lp = LinearProgram.from_rows([3, 5], [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)], sense="max")
    s = solve_lp(lp)
    assert s.status == "Optimal"
    assert s.objective == pytest.approx(36)
    assert s.x == pytest.approx([2, 6])
    assert s.duals == pytest.approx([0, 1.5, 1])
    assert dual_objective(lp, s) == pytest.approx(36)


def test_infeasible_and_unbounded():
    infeasible = LinearProgram.from_rows([1, 1], [([1, 1], "<=", 1), ([1, 1], ">=", 3)])
    assert solve_lp(infeasible).status == "Infeasible"
    unbounded = LinearProgram.from_rows([-1, 0], [([1, -1], "<=", 1)])
    assert solve_lp(unbounded).status == "Unbounded"


def test_free_and_upper_bounded_variables():
    # min x - y with x free, y <= 3, x >= y - 10 (row), x + y = 2
    lp = LinearProgram.from_rows(
        [1, -1], [([1, -1], ">=", -10), ([1, 1], "=", 2)], lb=[-math.inf, -math.inf], ub=[math.inf, 3]
    )
    s = solve_lp(lp)
    assert s.status == "Optimal"
    assert s.objective == pytest.approx(-4)
    assert s.x == pytest.approx([-1, 3])


def test_empty_rows():
    ok = LinearProgram.from_rows([1], [([0], "<=", 1), ([1], ">=", 2)])
    s = solve_lp(ok)
    assert s.objective == pytest.approx(2)
    assert s.duals[0] == 0.0
    assert solve_lp(LinearProgram.from_rows([1], [([0], ">=", 1)])).status == "Infeasible"


def test_fixed_and_no_rows():
    lp = LinearProgram.from_rows([2, -1], [], lb=[1, 0], ub=[1, 4])
    s = solve_lp(lp)
    assert s.objective == pytest.approx(-2)
    assert s.x == pytest.approx([1, 4])


@pytest.mark.parametrize("rule", ["bland", "dantzig"])
def test_beale_cycling_example(rule):
    # textbook instance that cycles under naive Dantzig pricing
    lp = LinearProgram.from_rows(
        [-0.75, 150, -0.02, 6],
        [([0.25, -60, -0.04, 9], "<=", 0), ([0.5, -90, -0.02, 3], "<=", 0), ([0, 0, 1, 0], "<=", 1)],
    )
    s = solve_lp(lp, pivot_rule=rule)
    assert s.status == "Optimal"
    assert s.objective == pytest.approx(-0.05)


def test_redundant_equalities():
    lp = LinearProgram.from_rows([1, 2, 3], [([1, 1, 1], "=", 3), ([2, 2, 2], "=", 6), ([1, 0, 0], "<=", 2)])
    s = solve_lp(lp)
    assert s.objective == pytest.approx(4)
    assert dual_objective(lp, s) == pytest.approx(4)


def test_random_lps_match_highs():
    rng = np.random.default_rng(11)
    counts = {"Optimal": 0, "Infeasible": 0, "Unbounded": 0}
    for _ in range(300):
        m, n = rng.integers(1, 7), rng.integers(1, 7)
        lb = np.where(rng.random(n) < 0.7, rng.integers(-3, 3, n), -np.inf).astype(float)
        ub = np.where((rng.random(n) < 0.5) & np.isfinite(lb), lb + rng.integers(0, 5, n), np.inf)
        lp = LinearProgram(
            rng.integers(-5, 6, n).astype(float),
            rng.integers(-5, 6, (m, n)).astype(float),
            tuple(rng.choice(["<=", ">=", "="], m)),
            rng.integers(-8, 9, m).astype(float),
            lb,
            ub,
            "min" if rng.random() < 0.5 else "max",
        )
        ref_status, ref_obj = highs(lp)
        s = solve_lp(lp)
        assert s.status == ref_status
        counts[s.status] += 1
        if ref_obj is not None:
            assert s.objective == pytest.approx(ref_obj, abs=1e-6 * (1 + abs(ref_obj)))
            assert lp.max_violation(s.x) <= 1e-7
    assert min(counts.values()) >= 10


def test_duality_and_slackness_on_feasible_lps():
    rng = np.random.default_rng(5)
    optimal = 0
    for _ in range(200):
        lp = random_feasible_lp(rng)
        s = solve_lp(lp)
        assert s.status in ("Optimal", "Unbounded")
        if s.status == "Unbounded":
            assert highs(lp)[0] == "Unbounded"
            continue
        optimal += 1
        assert abs(dual_objective(lp, s) - s.objective) <= 1e-6 * (1 + abs(s.objective))
        assert complementary_slackness_gap(lp, s.x, s.duals, s.reduced_costs) <= 1e-6
    assert optimal >= 100


def test_warm_start_matches_cold_solve():
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(200):
        lp = random_feasible_lp(rng)
        model = SimplexModel(lp)
        s0, ws = model.solve(keep_tableau=bool(rng.integers(2)))
        if ws is None:
            continue
        j = int(rng.integers(lp.n_vars))
        if not math.isfinite(lp.lb[j]):
            continue
        lo, hi = lp.lb.copy(), lp.ub.copy()
        if rng.random() < 0.5:
            hi[j] = max(lo[j], math.floor(s0.x[j] - 0.5))
        else:
            lo[j] = min(hi[j], math.ceil(s0.x[j] + 0.5))
        warm, _ = model.solve(lo, hi, warm=ws)
        cold = solve_lp(lp.with_bounds(lo, hi))
        assert warm.status == cold.status
        if cold.status == "Optimal":
            assert warm.objective == pytest.approx(cold.objective, abs=1e-6)
        checked += 1
    assert checked >= 50


def test_past_deadline_raises():
    rng = np.random.default_rng(0)
    lp = LinearProgram(rng.random(60) - 1, rng.random((40, 60)), ("<=",) * 40, np.ones(40), 0.0, math.inf)
    with pytest.raises(SolverTimeout):
        solve_lp(lp, deadline=time.monotonic() - 1)


def test_malformed_models_rejected():
    with pytest.raises(MalformedModel):
        LinearProgram.from_rows([1, 2], [([1], "<=", 1)])
    with pytest.raises(MalformedModel):
        LinearProgram.from_rows([1], [([1], "<", 1)])
    with pytest.raises(MalformedModel):
        LinearProgram.from_rows([1], [], lb=[2], ub=[1])
    with pytest.raises(ValueError):
        solve_lp(LinearProgram.from_rows([1], []), pivot_rule="steepest")


def test_lp_text_dump():
    lp = LinearProgram.from_rows([1, -2], [([1, 1], "<=", 4)], ub=[1, math.inf], names=["a", "b"])
    text = to_lp_text(lp)
    assert "a" in text and "b" in text and "<=" in text


def test_single_lower_row_dual():
    s = solve_lp(LinearProgram.from_rows([1], [([1], ">=", 1)], lb=[-math.inf]))
    assert s.objective == pytest.approx(1) and s.duals == pytest.approx([1])
