"""``regret-kit`` command line: generate, solve, bench, verify."""

from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings
from pathlib import Path

from .bench import (
    CSV_COLUMNS,
    BadParams,
    bench,
    format_summary,
    gap_pct,
    load_instance,
    record_from_report,
    run_algorithm,
    set_name,
)
from .errors import RegretKitError
from .rrsp import format_rrsp, generate_coco, generate_karasan
from .rsc import (
    format_rsc,
    generate_beasley,
    generate_kz,
    generate_montemanni,
    parse_orlib,
    serialize_orlib,
    synthetic_structure,
)
from .verify import run_verify

FAMILIES = ("karasan", "coco", "beasley", "montemanni", "kz", "synthetic-sc")


def _structure(args):
    if args.scp:
        p = Path(args.scp)
        return parse_orlib(p.read_text(), name=p.stem)
    if args.rows is None or args.cols is None:
        raise BadParams("set covering families need --scp FILE or --rows/--cols for a synthetic structure")
    return synthetic_structure(args.rows, args.cols, args.density, args.structure_seed)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise BadParams(f"{args.family} needs {' '.join(missing)}")


def cmd_generate(args) -> int:
    fam = args.family
    if fam == "karasan":
        _need(args, "v", "phi", "delta", "omega")
        g = generate_karasan(args.v, args.phi, args.delta, args.omega, args.seed)
        name, text, ext = g.name, format_rrsp(g, args.seed), ".rrsp"
    elif fam == "coco":
        _need(args, "n", "m", "phi", "delta")
        g = generate_coco(args.n, args.m, args.phi, args.delta, args.seed)
        name, text, ext = g.name, format_rrsp(g, args.seed), ".rrsp"
    elif fam == "synthetic-sc":
        _need(args, "rows", "cols")
        s = synthetic_structure(args.rows, args.cols, args.density, args.seed)
        name, text, ext = s.name, serialize_orlib(s), ".scp"
    else:
        struct = _structure(args)
        if fam == "beasley":
            _need(args, "delta")
            p = generate_beasley(struct, args.delta, args.seed)
        elif fam == "montemanni":
            p = generate_montemanni(struct, args.seed)
        else:
            p = generate_kz(struct, args.seed)
        name, text, ext = p.name, format_rsc(p, args.seed), ".rsc"
    out = Path(args.out) if args.out else Path.cwd()
    if out.suffix not in (".rrsp", ".rsc", ".scp"):
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"{name}_s{args.seed}{ext}"
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(name)
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    problem, name = load_instance(args.instance)
    rep = run_algorithm(problem, args.algo, args.time_limit)
    rec = record_from_report(Path(args.instance).stem, set_name(args.instance, name), args.algo, rep)
    lb = rep.lower_bound
    print(f"instance        {name}")
    print(f"algorithm       {rep.algorithm}")
    print(f"status          {rep.status}")
    print(f"robustness cost {rep.robustness_cost if rep.robustness_cost is not None else '-'}")
    print(f"lower bound     {lb if math.isfinite(lb) else '-'}")
    if rep.heuristic_objective is not None:
        print(f"heuristic obj   {rep.heuristic_objective:.6g}")
    print(f"iterations      {rec.iters}")
    print(f"time (s)        {rep.wall_time:.3f}")
    if rep.y is not None:
        print(f"solution        {' '.join(str(i) for i in rep.y.nonzero()[0].tolist())}")
    rec.gap_pct = gap_pct(rec.ub, rec.lb)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerow(rec.csv_row())
    return 0


def cmd_bench(args) -> int:
    summaries = bench(args.manifest, args.out)
    sys.stdout.write(format_summary(summaries))
    return 0


def cmd_verify(args) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = run_verify(args.trials, args.seed, args.max_vertices, args.max_cols, args.time_limit, args.out)
    print(rep.render())
    for v in rep.violations[:5]:
        print(f"\nviolation: {v.check}\n  {v.detail}\n" + "\n".join("  " + ln for ln in v.instance.splitlines()))
    if rep.violations and args.out:
        print(f"\ncounterexamples written to {args.out}")
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regret-kit", description="Interval min-max regret solvers for R-RSP and RSC.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instance file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", help="output directory or file path (default: current directory)")
    g.add_argument("--v", type=int, help="karasan: layer vertices")
    g.add_argument("--omega", type=int, help="karasan: layer width")
    g.add_argument("--n", type=int, help="coco: grid rows")
    g.add_argument("--m", type=int, help="coco: grid columns")
    g.add_argument("--phi", type=int, help="karasan/coco: maximum base cost")
    g.add_argument("--delta", type=float, help="karasan/coco/beasley: interval spread in (0,1)")
    g.add_argument("--scp", help="beasley/montemanni/kz: OR-Library scp structure file")
    g.add_argument("--rows", type=int, help="synthetic structure rows")
    g.add_argument("--cols", type=int, help="synthetic structure columns")
    g.add_argument("--density", type=float, default=0.1, help="synthetic structure density")
    g.add_argument("--structure-seed", type=int, default=1, help="seed of the synthetic structure")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run one algorithm on one instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=("amu", "lph", "benders", "brute"), required=True)
    s.add_argument("--time-limit", type=float, default=60.0)
    s.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; all algorithms are deterministic")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a manifest and write raw and summary CSVs")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", required=True, help="raw CSV path; the summary goes to <stem>_summary.csv")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="oracle checks on random tiny instances")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-vertices", type=int, default=8)
    v.add_argument("--max-cols", type=int, default=8)
    v.add_argument("--time-limit", type=float, default=60.0)
    v.add_argument("--out", help="directory for counterexample instance files")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "time_limit", 1.0) <= 0:
        print("error: --time-limit must be positive", file=sys.stderr)
        return 2
    if args.command == "verify" and args.trials == 0:
        print("warning: 0 trials, verification is vacuous", file=sys.stderr)
    try:
        return args.func(args)
    except (RegretKitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
