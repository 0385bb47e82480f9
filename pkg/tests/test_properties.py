"""Randomized properties driven by hypothesis."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from _cases import complementary_slackness_gap, random_feasible_lp
from regret_kit.bench import gap_pct
from regret_kit.core import Scenario, brute_force_robust, robustness_cost
from regret_kit.lp import dual_objective, solve_lp
from regret_kit.rrsp import RRSPProblem, format_rrsp, generate_coco, generate_random, parse_rrsp
from regret_kit.rsc import RSCProblem, format_rsc, generate_kz, parse_rsc, synthetic_structure

seeds = st.integers(0, 2**64 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_bounded_optimum_satisfies_duality(seed):
    lp = random_feasible_lp(np.random.default_rng(seed % 2**32))
    sol = solve_lp(lp)
    if sol.status != "Optimal":
        assert sol.status == "Unbounded"
        return
    assert abs(sol.objective - dual_objective(lp, sol)) <= 1e-6 * (1 + abs(sol.objective))
    assert complementary_slackness_gap(lp, sol.x, sol.duals, sol.reduced_costs) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([0.1, 0.5, 0.9]))
def test_grid_round_trip_any_seed(seed, delta):
    g = generate_coco(2, 2, 20, delta, seed)
    assert np.all(g.l <= g.u) and np.all(g.l >= 0)
    text = format_rrsp(g, seed)
    assert format_rrsp(parse_rrsp(text), seed) == text


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_rsc_round_trip_any_seed(seed):
    p = generate_kz(synthetic_structure(3, 4, 0.5, seed), seed)
    text = format_rsc(p, seed)
    assert format_rsc(parse_rsc(text), seed) == text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_no_scenario_beats_the_induced_one(seed, data):
    """Regret of y in any random scenario never exceeds its robustness cost."""
    g = generate_random(5, 4, seed)
    p = RRSPProblem(g)
    feasible = list(p.enumerate_feasible(1000))
    y = feasible[data.draw(st.integers(0, len(feasible) - 1))]
    R = robustness_cost(y, p)
    assert R >= 0
    for _ in range(5):
        c = np.array([data.draw(st.integers(int(a), int(b))) for a, b in zip(g.l, g.u)])
        s = Scenario(c.astype(float))
        assert s.cost(y) - min(s.cost(x) for x in feasible) <= R


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_robust_optimum_is_a_lower_bound(seed):
    p = RSCProblem(generate_kz(synthetic_structure(3, 5, 0.5, seed), seed))
    opt = brute_force_robust(p).robustness_cost
    assert all(robustness_cost(y, p) >= opt for y in p.enumerate_feasible(100))


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_gap_range(a, b):
    lb, ub = min(a, b), max(a, b)
    g = gap_pct(ub, lb)
    assert g is not None and 0 <= g <= 100
