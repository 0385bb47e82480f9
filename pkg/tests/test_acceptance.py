"""Acceptance criteria 1-11. Each test prints one ``criterion N: PASS|FAIL`` line."""

import contextlib
import statistics
import sys
import time

import numpy as np
import pytest

from _cases import complementary_slackness_gap, enumerate_binary_optimum, random_binary_mip, random_feasible_lp
from regret_kit.bench import run_cells
from regret_kit.cli import main
from regret_kit.core import amu, benders, brute_force_robust, induced_scenario, lph, robustness_cost
from regret_kit.lp import EPS_DUAL, dual_objective, solve_lp, solve_milp
from regret_kit.rng import Xoshiro256
from regret_kit.rrsp import (
    IntervalDigraph,
    Path,
    RRSPProblem,
    build_i1,
    classical_rsp,
    extract_elementary,
    format_rrsp,
    generate_coco,
    generate_karasan,
    generate_random,
)
from regret_kit.rsc import RSCProblem, classical_sc
from regret_kit.verify import extreme_max_regret, feasible_matrix, non_elementary_flows, random_rrsp, random_rsc


_capture = None


@pytest.fixture(autouse=True)
def _uncaptured_lines(request):
    global _capture
    _capture = request.config.pluginmanager.getplugin("capturemanager")
    yield


def say(line):
    with _capture.global_and_fixture_disabled():
        sys.stdout.write(line)
        sys.stdout.flush()


@contextlib.contextmanager
def criterion(n, what):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        say(f"\ncriterion {n}: FAIL  {what}\n")
        raise
    say(f"\ncriterion {n}: PASS  {what} ({time.monotonic() - start:.1f} s)\n")


class Runs:
    """Every algorithm on the 200 small instances, computed once and shared."""

    def __init__(self):
        rng = Xoshiro256(2024)
        self.problems = []
        self.raw = []
        for _ in range(100):
            g = random_rrsp(rng, max_vertices=10, max_arcs=14)
            self.problems.append(RRSPProblem(g))
            self.raw.append(g)
        for _ in range(100):
            c = random_rsc(rng, max_cols=8)
            self.problems.append(RSCProblem(c))
            self.raw.append(c)
        start = time.monotonic()
        self.results = [
            {"brute": brute_force_robust(p), "benders": benders(p), "amu": amu(p), "lph": lph(p)} for p in self.problems
        ]
        self.elapsed = time.monotonic() - start


@pytest.fixture(scope="module")
def runs():
    return Runs()


def test_criterion_1_arithmetic_anchor():
    with criterion(1, "path costing 9 against a beta-restricted optimum of 8 has regret 1"):
        start = time.monotonic()
        g = IntervalDigraph(4, [0, 1, 2, 0, 0], [1, 2, 3, 2, 3], [1, 1, 3, 3, 1], [2, 2, 5, 6, 1], [1, 1, 1, 1, 5], 0, 3, 3)
        y = Path((0, 1, 2)).vector(g.n_arcs)
        s = induced_scenario(y, g.intervals())
        assert s.cost(y) == 2 + 2 + 5
        assert classical_rsp(g, s)[1] == 3 + 5
        assert robustness_cost(y, RRSPProblem(g)) == 1
        assert time.monotonic() - start < 1


def test_criterion_2_benders_matches_brute_force(runs):
    with criterion(2, f"Benders == brute force on 100 R-RSP + 100 RSC instances, all runs {runs.elapsed:.1f} s"):
        assert sum(isinstance(p, RRSPProblem) for p in runs.problems) == 100
        assert all(g.n_vertices <= 10 for g in runs.raw[:100])
        assert all(c.structure.n_cols <= 8 for c in runs.raw[100:])
        for r in runs.results:
            b = r["benders"]
            assert b.status == "Proved"
            assert b.robustness_cost == r["brute"].robustness_cost
            assert all(x <= y for x, y in zip(b.lb_history, b.lb_history[1:]))
        assert runs.elapsed < 120


def test_criterion_3_induced_scenario_is_worst():
    with criterion(3, "extreme-scenario maximum equals induced regret (50 instances x 5 solutions)"):
        rng = Xoshiro256(33)
        problems = []
        while len(problems) < 50:
            p = RRSPProblem(random_rrsp(rng, 8, 12)) if len(problems) % 2 else RSCProblem(random_rsc(rng, 8))
            if p.intervals().n <= 12 and len(feasible_matrix(p)) >= 5:
                problems.append(p)
        checked = 0
        for p in problems:
            F = feasible_matrix(p)
            for k in np.random.default_rng(checked).choice(len(F), 5, replace=False):
                assert extreme_max_regret(p, F[k], F) == robustness_cost(F[k], p)
                checked += 1
        assert checked >= 250


def test_criterion_4_amu_two_approximation(runs):
    with criterion(4, "OPT <= AMU <= 2 OPT on the criterion-2 instances"):
        for r in runs.results:
            opt = r["brute"].robustness_cost
            assert opt <= r["amu"].robustness_cost <= 2 * opt


def test_criterion_5_lph_exact_on_plain_paths():
    with criterion(5, "LPH optimal on 50 plain shortest-path instances"):
        for seed in range(50):
            g = generate_random(8, 6, seed)
            g = IntervalDigraph(g.n_vertices, g.tail, g.head, g.l, g.u, np.zeros(g.n_arcs), g.origin, g.dest, 0)
            p = RRSPProblem(g)
            assert lph(p).robustness_cost == brute_force_robust(p).robustness_cost


def test_criterion_6_lph_sandwich(runs):
    with criterion(6, "OPT <= LPH <= heuristic objective on the criterion-2 instances"):
        for r in runs.results:
            h = r["lph"]
            assert r["brute"].robustness_cost <= h.robustness_cost
            assert h.robustness_cost <= h.heuristic_objective + EPS_DUAL * (1 + abs(h.heuristic_objective))


def test_criterion_7_elementary_extraction():
    with criterion(7, "elementary extraction never raises regret (50 cyclic flows)"):
        rng = Xoshiro256(7)
        seen = 0
        while seen < 50:
            g = random_rrsp(rng, 7, 12)
            loose = g.with_beta(int(g.d.sum()))
            p = RRSPProblem(loose)
            for y in non_elementary_flows(loose, limit=5):
                out = extract_elementary(loose, y)
                assert out.is_elementary(loose)
                assert robustness_cost(out.vector(loose.n_arcs), p) <= robustness_cost(y, p)
                seen += 1


def test_criterion_8_classical_solvers(runs):
    with criterion(8, "label-setting == flow MILP and cover solver == enumeration"):
        rng = np.random.default_rng(8)
        for p, raw in zip(runs.problems, runs.raw):
            iv = p.intervals()
            for c in (iv.l, iv.u, rng.integers(iv.l, iv.u + 1)):
                c = np.asarray(c, dtype=float)
                if isinstance(p, RRSPProblem):
                    assert classical_rsp(raw, c)[1] == solve_milp(build_i1(raw, c)).objective
                else:
                    assert classical_sc(raw, c)[1] == float((feasible_matrix(p) @ c).min())


def test_criterion_9_lph_beats_amu_on_average(tmp_path):
    with criterion(9, "mean gap LPH <= mean gap AMU on 10 layered + 10 grid instances"):
        cells = []
        for seed in range(1, 11):
            for g in (generate_karasan(100, 20, 0.9, 5, seed), generate_coco(10, 10, 20, 0.9, seed)):
                f = tmp_path / f"{g.name}_s{seed}.rrsp"
                f.write_text(format_rrsp(g, seed))
                cells.append((str(f), ["benders", "amu", "lph"], 60.0))
        start = time.monotonic()
        recs = run_cells(cells)
        assert time.monotonic() - start < 15 * 60
        assert not [r for r in recs if r.status.startswith("Error")]
        gaps = {a: [r.gap_pct for r in recs if r.algo == a] for a in ("amu", "lph")}
        assert all(len(v) == 20 and None not in v for v in gaps.values())
        m_amu, m_lph = statistics.fmean(gaps["amu"]), statistics.fmean(gaps["lph"])
        say(f"\n  mean gap AMU {m_amu:.2f}%  LPH {m_lph:.2f}%")
        assert m_lph <= m_amu


def test_criterion_10_lp_engine():
    with criterion(10, "strong duality + slackness on 500 LPs, MILP == enumeration on 200 models"):
        start = time.monotonic()
        rng = np.random.default_rng(10)
        optimal = 0
        while optimal < 500:
            lp = random_feasible_lp(rng)
            s = solve_lp(lp)
            if s.status != "Optimal":
                continue
            optimal += 1
            assert abs(s.objective - dual_objective(lp, s)) <= 1e-6 * (1 + abs(s.objective))
            assert complementary_slackness_gap(lp, s.x, s.duals, s.reduced_costs) <= 1e-6
        for _ in range(200):
            mip = random_binary_mip(rng, max_n=12)
            ref = enumerate_binary_optimum(mip)
            res = solve_milp(mip)
            if ref is None:
                assert res.status == "Infeasible"
            else:
                assert res.objective == pytest.approx(ref, abs=1e-6)
        assert time.monotonic() - start < 180


def test_criterion_11_reproducibility(tmp_path, capsys):
    with criterion(11, "byte-identical generation and deterministic solves"):
        cmds = [
            ["karasan", "--v", "20", "--phi", "20", "--delta", "0.5", "--omega", "5"],
            ["coco", "--n", "3", "--m", "4", "--phi", "20", "--delta", "0.9"],
            ["beasley", "--rows", "6", "--cols", "8", "--delta", "0.5"],
            ["montemanni", "--rows", "6", "--cols", "8"],
            ["kz", "--rows", "6", "--cols", "8"],
        ]
        for k, cmd in enumerate(cmds):
            for run in ("a", "b"):
                assert main(["generate", *cmd, "--seed", str(k + 3), "--out", str(tmp_path / run)]) == 0
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert len(files) == 5
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        capsys.readouterr()
        for name in files:
            for algo in ("amu", "lph", "benders"):
                outs = []
                for _ in range(2):
                    assert main(["solve", str(tmp_path / "a" / name), "--algo", algo]) == 0
                    text = capsys.readouterr().out.splitlines()
                    outs.append([ln for ln in text[:-1] if not ln.startswith("time")] + [text[-1].rsplit(",", 2)[0]])
                assert outs[0] == outs[1]
