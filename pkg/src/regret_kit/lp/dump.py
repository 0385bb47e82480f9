"""Write a model as CPLEX-LP-style text for manual inspection (never parsed back)."""

from __future__ import annotations

import math

from .model import LinearProgram, MixedIntegerProgram


def _term(coef: float, name: str, first: bool) -> str:
    if coef == 0:
        return ""
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    body = name if mag == 1 else f"{mag:g} {name}"
    return f"{sign} {body}".strip() if first else f" {sign} {body}"


def _expr(row, names) -> str:
    parts = []
    for j, a in enumerate(row):
        t = _term(float(a), names[j], not parts)
        if t:
            parts.append(t)
    return "".join(parts) if parts else "0"


def to_lp_text(model: LinearProgram | MixedIntegerProgram) -> str:
    mip = model if isinstance(model, MixedIntegerProgram) else None
    lp = mip.lp if mip else model
    names = lp.names or tuple(f"x{j}" for j in range(lp.n_vars))
    out = ["Minimize" if lp.sense == "min" else "Maximize", f" obj: {_expr(lp.c, names)}", "Subject To"]
    for i in range(lp.n_rows):
        out.append(f" c{i}: {_expr(lp.A[i], names)} {lp.relations[i]} {lp.b[i]:g}")
    out.append("Bounds")
    binaries = set(mip.binaries) if mip else set()
    for j, name in enumerate(names):
        if j in binaries:
            continue
        lo, hi = lp.lb[j], lp.ub[j]
        if lo == -math.inf and hi == math.inf:
            out.append(f" {name} free")
        elif lo != 0 or hi != math.inf:
            lo_s = "-inf" if lo == -math.inf else f"{lo:g}"
            hi_s = "+inf" if hi == math.inf else f"{hi:g}"
            out.append(f" {lo_s} <= {name} <= {hi_s}")
    if binaries:
        out.append("Binaries")
        out.append(" " + " ".join(names[j] for j in sorted(binaries)))
    out.append("End")
    return "\n".join(out) + "\n"
