import numpy as np

import regret_kit.core as core
from regret_kit.core import Scenario
from regret_kit.rng import Xoshiro256
from regret_kit.rrsp import IntervalDigraph, RRSPProblem, parse_rrsp
from regret_kit.verify import (
    VerifyReport,
    extreme_max_regret,
    non_elementary_flows,
    run_verify,
    verify_rrsp_instance,
)


def test_clean_run_passes_every_check():
    rep = run_verify(trials=4, seed=3)
    assert rep.ok
    assert {"benders == brute", "induced scenario is worst", "classical_sc == enumeration"} <= set(rep.passed)


def test_extreme_enumeration_on_two_arcs():
    g = IntervalDigraph(2, [0, 0], [1, 1], [1, 2], [3, 4], [0, 0], 0, 1, 0)
    p = RRSPProblem(g)
    assert extreme_max_regret(p, np.array([1, 0])) == 1
    assert extreme_max_regret(p, np.array([0, 1])) == 3


def test_broken_induced_scenario_is_caught(monkeypatch, tmp_path):
    # lower-bound scenario instead of the induced one: regrets come out too small
    monkeypatch.setattr(core, "induced_scenario", lambda y, iv: Scenario(np.array(iv.l, dtype=float)))
    g = IntervalDigraph(3, [0, 0, 1], [1, 1, 2], [2, 1, 1], [3, 5, 4], [0, 0, 0], 0, 2, 0)
    rep = VerifyReport(trials=1)
    verify_rrsp_instance(g, rep, Xoshiro256(1), time_limit=10)
    bad = [v for v in rep.violations if v.check.startswith("induced scenario")]
    assert bad
    # the dumped instance replays
    assert parse_rrsp(bad[0].instance).n_arcs == 3
    out = run_verify(trials=2, seed=1, dump_dir=tmp_path)
    assert not out.ok
    files = sorted(tmp_path.iterdir())
    assert files and files[0].read_text().startswith("# check:")


def test_non_elementary_flows_contain_cycles():
    g = IntervalDigraph(4, [0, 1, 2, 1], [1, 2, 1, 3], [1, 2, 0, 4], [3, 5, 2, 6], [1, 1, 1, 1], 0, 3, 10)
    flows = non_elementary_flows(g)
    assert flows
    for y in flows:
        assert RRSPProblem(g).is_feasible(y) and y.sum() > 2
