"""Benchmark harness: run (instance, algorithm) cells, write raw CSV rows, summarize gaps.

Gaps follow ``100 * (UB - LB) / UB`` where LB is the Benders lower bound of
the same instance (or the brute-force optimum when only that ran), clipped at
zero because robustness costs are nonnegative.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
import statistics
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .core import RobustProblem, SolveReport, amu, benders, brute_force_robust, lph
from .rrsp import RRSPProblem, parse_rrsp
from .rsc import RSCProblem, parse_rsc

ALGORITHMS = {"amu": amu, "lph": lph, "benders": benders, "brute": None}
CSV_COLUMNS = ("instance", "set", "algo", "status", "ub", "lb", "gap_pct", "time_s", "iters")
STDEV_NOTE = "# stdev: sample standard deviation (n - 1) over the instances of a set"


class BadParams(ValueError):
    pass


def load_instance(path: str | os.PathLike) -> tuple[RobustProblem, str]:
    """Read a ``.rrsp`` or ``.rsc`` file; returns the problem and its instance name."""
    p = Path(path)
    text = p.read_text()
    stem = p.stem
    if p.suffix == ".rrsp" or text.lstrip().startswith("rrsp"):
        g = parse_rrsp(text)
        return RRSPProblem(g), g.name or stem
    if p.suffix == ".rsc":
        c = parse_rsc(text)
        return RSCProblem(c), c.name or stem
    raise BadParams(f"unknown instance type for {p}")


def set_name(path: str | os.PathLike, name: str) -> str:
    """Instance set: the generator name, falling back to the file stem without its seed suffix."""
    return name or re.sub(r"_s\d+$", "", Path(path).stem)


def run_algorithm(problem: RobustProblem, algo: str, time_limit: float) -> SolveReport:
    if algo not in ALGORITHMS:
        raise BadParams(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    if algo == "brute":
        return brute_force_robust(problem)
    return ALGORITHMS[algo](problem, time_limit)


@dataclass
class BenchRecord:
    instance: str
    set: str
    algo: str
    status: str
    ub: float | None
    lb: float | None
    time_s: float
    iters: int
    nodes: int = 0
    heuristic_objective: float | None = None
    gap_pct: float | None = None

    @property
    def proved(self) -> bool:
        return self.status == "Proved"

    def csv_row(self) -> list[str]:
        def num(v):
            if v is None or (isinstance(v, float) and not math.isfinite(v)):
                return ""
            return repr(v) if isinstance(v, float) else str(v)

        return [
            self.instance,
            self.set,
            self.algo,
            self.status,
            num(self.ub),
            num(self.lb),
            num(self.gap_pct),
            repr(self.time_s),
            str(self.iters),
        ]


def record_from_report(instance: str, set_: str, algo: str, rep: SolveReport) -> BenchRecord:
    lb = rep.lower_bound if math.isfinite(rep.lower_bound) else None
    return BenchRecord(
        instance,
        set_,
        algo,
        rep.status,
        rep.robustness_cost,
        lb,
        rep.wall_time,
        rep.cuts if rep.algorithm == "Benders" else rep.iterations,
        rep.nodes,
        rep.heuristic_objective,
    )


def run_cell(path: str, algo: str, time_limit: float) -> BenchRecord:
    """One (instance, algorithm) run. Failures become an ``Error:<type>`` record."""
    start = time.monotonic()
    name = Path(path).stem
    set_ = set_name(path, "")
    try:
        problem, name = load_instance(path)
        set_ = set_name(path, name)
        rep = run_algorithm(problem, algo, time_limit)
    except Exception as exc:  # recorded, the sweep continues
        status = f"Error:{type(exc).__name__}"
        if os.environ.get("REGRET_KIT_DEBUG"):
            traceback.print_exc()
        return BenchRecord(Path(path).stem, set_, algo, status, None, None, time.monotonic() - start, 0)
    rec = record_from_report(Path(path).stem, set_, algo, rep)
    return rec


def gap_pct(ub: float | None, lb: float | None) -> float | None:
    if ub is None or lb is None:
        return None
    lb = max(lb, 0.0)
    if ub == lb:
        return 0.0
    if ub <= 0:
        return None
    return 100.0 * (ub - lb) / ub


def improvement_pct(ub_amu: float | None, ub_lph: float | None) -> float | None:
    if ub_amu is None or ub_lph is None:
        return None
    if ub_amu == ub_lph:
        return 0.0
    if ub_amu == 0:
        return None
    return 100.0 * (ub_amu - ub_lph) / ub_amu


def attach_gaps(records: list[BenchRecord]) -> list[BenchRecord]:
    """Fill ``lb``/``gap_pct`` for heuristic rows from the instance's exact-method bound."""
    ref: dict[str, float] = {}
    for r in records:
        if r.algo in ("benders", "brute") and r.lb is not None:
            ref[r.instance] = max(ref.get(r.instance, -math.inf), r.lb)
    for r in records:
        if r.algo in ("amu", "lph"):
            r.lb = ref.get(r.instance)
        r.gap_pct = gap_pct(r.ub, r.lb)
    return records


def parse_manifest(text: str, base: Path | None = None) -> list[tuple[str, list[str], float]]:
    """Lines ``<instance path> <algo,algo,...> <time limit s>``; ``#`` starts a comment.

    Relative paths resolve against ``base`` (the manifest's directory).
    """
    cells = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 3:
            raise BadParams(f"manifest line {lineno}: expected '<path> <algos> <time limit>'")
        path, algos, tl = toks
        algo_list = algos.split(",")
        for a in algo_list:
            if a not in ALGORITHMS:
                raise BadParams(f"manifest line {lineno}: unknown algorithm {a!r}")
        try:
            limit = float(tl)
        except ValueError:
            raise BadParams(f"manifest line {lineno}: bad time limit {tl!r}") from None
        if limit <= 0:
            raise BadParams(f"manifest line {lineno}: time limit must be positive")
        p = Path(path)
        if base is not None and not p.is_absolute():
            p = base / p
        cells.append((str(p), algo_list, limit))
    return cells


def thread_cap() -> int:
    env = os.environ.get("REGRET_KIT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise BadParams(f"REGRET_KIT_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise BadParams("REGRET_KIT_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _star(args):
    return run_cell(*args)


def run_cells(cells: list[tuple[str, list[str], float]], workers: int | None = None) -> list[BenchRecord]:
    jobs = [(path, a, tl) for path, algos, tl in cells for a in algos]
    workers = min(workers or thread_cap(), max(1, len(jobs)))
    if workers == 1:
        records = [run_cell(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers) as ex:
            records = list(ex.map(_star, jobs))
    return attach_gaps(records)


def write_csv(records: list[BenchRecord], fh) -> None:
    fh.write(STDEV_NOTE + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())


def read_csv(fh) -> list[BenchRecord]:
    lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        f = lambda k: float(row[k]) if row[k] != "" else None  # noqa: E731
        out.append(
            BenchRecord(
                row["instance"],
                row["set"],
                row["algo"],
                row["status"],
                f("ub"),
                f("lb"),
                float(row["time_s"]),
                int(row["iters"]),
                gap_pct=f("gap_pct"),
            )
        )
    return out


@dataclass
class AlgoSummary:
    count: int = 0
    solved: int = 0
    mean_time: float | None = None
    mean_gap: float | None = None
    stdev_gap: float | None = None


@dataclass
class ImprovementSummary:
    better: int = 0
    total: int = 0
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    stdev: float | None = None


@dataclass
class GapSummary:
    """Per instance-set statistics in the layout of the usual gap tables."""

    set: str
    algos: dict[str, AlgoSummary] = field(default_factory=dict)
    improvement: ImprovementSummary = field(default_factory=ImprovementSummary)


def _mean_sd(xs: list[float]) -> tuple[float | None, float | None]:
    if not xs:
        return None, None
    return statistics.fmean(xs), (statistics.stdev(xs) if len(xs) > 1 else 0.0)


def summarize(records: list[BenchRecord]) -> list[GapSummary]:
    """Aggregate per set. Benders time is averaged over proved instances only."""
    order: list[str] = []
    by_set: dict[str, list[BenchRecord]] = {}
    for r in records:
        if r.set not in by_set:
            order.append(r.set)
        by_set.setdefault(r.set, []).append(r)
    out = []
    for s in order:
        rs = by_set[s]
        gs = GapSummary(s)
        for algo in ALGORITHMS:
            cell = [r for r in rs if r.algo == algo]
            if not cell:
                continue
            timed = [r.time_s for r in cell if r.proved] if algo in ("benders", "brute") else [r.time_s for r in cell]
            gaps = [r.gap_pct for r in cell if r.gap_pct is not None]
            m, sd = _mean_sd(gaps)
            gs.algos[algo] = AlgoSummary(
                len(cell), sum(r.proved for r in cell), statistics.fmean(timed) if timed else None, m, sd
            )
        ub = {(r.instance, r.algo): r.ub for r in rs}
        imps = []
        for inst in dict.fromkeys(r.instance for r in rs):
            if (inst, "amu") in ub and (inst, "lph") in ub:
                v = improvement_pct(ub[inst, "amu"], ub[inst, "lph"])
                if v is not None:
                    imps.append(v)
        if imps:
            m, sd = _mean_sd(imps)
            gs.improvement = ImprovementSummary(sum(v > 0 for v in imps), len(imps), min(imps), max(imps), m, sd)
        out.append(gs)
    return out


def _f2(v: float | None) -> str:
    return "" if v is None else f"{v:.2f}"


def format_summary(summaries: list[GapSummary]) -> str:
    buf = io.StringIO()
    buf.write(STDEV_NOTE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["set", "algo", "count", "opt", "time_s", "avg_gap_pct", "stdev_gap_pct"])
    for gs in summaries:
        for algo, a in gs.algos.items():
            w.writerow([gs.set, algo, a.count, a.solved, _f2(a.mean_time), _f2(a.mean_gap), _f2(a.stdev_gap)])
    w.writerow([])
    w.writerow(["set", "lph_better", "pairs", "imp_min_pct", "imp_max_pct", "imp_avg_pct", "imp_stdev_pct"])
    for gs in summaries:
        im = gs.improvement
        if im.total:
            w.writerow([gs.set, im.better, im.total, _f2(im.min), _f2(im.max), _f2(im.mean), _f2(im.stdev)])
    return buf.getvalue()


def bench(manifest_path: str | os.PathLike, out_csv: str | os.PathLike, workers: int | None = None) -> list[GapSummary]:
    """Run every manifest cell, write raw rows to ``out_csv`` and the summary next to it."""
    mp = Path(manifest_path)
    cells = parse_manifest(mp.read_text(), mp.parent)
    records = run_cells(cells, workers)
    out = Path(out_csv)
    with out.open("w", newline="") as fh:
        write_csv(records, fh)
    summaries = summarize(records)
    out.with_name(out.stem + "_summary.csv").write_text(format_summary(summaries))
    return summaries
