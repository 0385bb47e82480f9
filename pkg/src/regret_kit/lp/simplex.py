"""Bounded-variable simplex on a dense tableau, with primal and dual iterations.

Every column carries its own box ``[L, U]`` (``U`` may be infinite) and a
nonbasic column rests at one of its bounds, so variable bounds never become
rows. Free variables are split into two nonnegative parts; a variable bounded
only from above is negated. Each inequality row gets a slack column, and rows
whose slack cannot start basic get an artificial column that is fixed to zero
once phase 1 ends (a redundant row just keeps a zero artificial basic).

:class:`SimplexModel` keeps that column layout so branch-and-bound can
re-solve after bound changes from a parent basis with dual simplex pivots.
Duals are recovered by solving ``B^T y = c_B`` on the untouched matrix.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .model import EPS_FEAS, EQ, GE, LE, LinearProgram, LpSolution, NumericalFailure, SolverTimeout

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
PRIMAL_TOL = 1e-9
# Dantzig pricing gives way to Bland's rule after this many consecutive
# degenerate pivots; Bland's rule then stays active until the phase ends.
DEGENERATE_STREAK = 30

_IDENT, _NEG, _SPLIT = range(3)


class _LayoutMismatch(ValueError):
    pass


@dataclass
class WarmStart:
    """A basis of one :class:`SimplexModel`, optionally with its final tableau."""

    model_id: int
    basis: np.ndarray
    at_upper: np.ndarray
    tableau: np.ndarray | None = None
    x: np.ndarray | None = None

    def without_tableau(self) -> "WarmStart":
        return WarmStart(self.model_id, self.basis, self.at_upper)

    @property
    def nbytes(self) -> int:
        return 0 if self.tableau is None else self.tableau.nbytes


class SimplexModel:
    """Column layout of one :class:`LinearProgram`, reusable under new variable bounds.

    The bounds may change between solves as long as each variable keeps the
    same pattern of finite and infinite bounds.
    """

    def __init__(self, lp: LinearProgram, pivot_rule: str = "dantzig"):
        if pivot_rule not in ("bland", "dantzig"):
            raise ValueError(f"unknown pivot rule {pivot_rule!r}")
        self.lp = lp
        self.pivot_rule = pivot_rule
        self.sign = 1.0 if lp.sense == "min" else -1.0
        m_user, n = lp.A.shape

        kinds, cols, blocks, costs = [], [], [], []
        for j in range(n):
            a = lp.A[:, j]
            cj = self.sign * lp.c[j]
            cols.append(len(blocks))
            if np.isfinite(lp.lb[j]):
                kinds.append(_IDENT)
                blocks.append(a)
                costs.append(cj)
            elif np.isfinite(lp.ub[j]):
                kinds.append(_NEG)
                blocks.append(-a)
                costs.append(-cj)
            else:
                kinds.append(_SPLIT)
                blocks += [a, -a]
                costs += [cj, -cj]
        self.kinds = np.array(kinds, dtype=int)
        self.cols = np.array(cols, dtype=int)
        ns = len(blocks)
        S = np.column_stack(blocks) if blocks else np.zeros((m_user, 0))

        nonempty = np.any(S != 0.0, axis=1) if m_user else np.zeros(0, dtype=bool)
        self.rows = np.nonzero(nonempty)[0]
        self.empty_rows = np.nonzero(~nonempty)[0]
        rels = [lp.relations[i] for i in self.rows]
        self.m = m = self.rows.size
        self.b = lp.b[self.rows].astype(float)

        slack_rows = [k for k, r in enumerate(rels) if r != EQ]
        n_real = ns + len(slack_rows)
        A = np.zeros((m, n_real))
        A[:, :ns] = S[self.rows]
        self.slack_of_row = np.full(m, -1)
        for t, k in enumerate(slack_rows):
            A[k, ns + t] = 1.0 if rels[k] == LE else -1.0
            self.slack_of_row[k] = ns + t

        # artificials where the slack cannot start basic under the model's own bounds
        L0, _ = self._box(lp.lb, lp.ub, n_real)
        resid = self.b - A @ L0
        need = [k for k in range(m) if self.slack_of_row[k] < 0 or resid[k] * A[k, self.slack_of_row[k]] < 0]
        self.n_real = n_real
        self.N = N = n_real + len(need)
        self.A = np.zeros((m, N))
        self.A[:, :n_real] = A
        self.art_of_row = np.full(m, -1)
        for t, k in enumerate(need):
            self.art_of_row[k] = n_real + t
            self.A[k, n_real + t] = 1.0 if resid[k] >= 0 else -1.0
        self.c = np.zeros(N)
        self.c[:ns] = costs

    def _box(self, lb: np.ndarray, ub: np.ndarray, width: int) -> tuple[np.ndarray, np.ndarray]:
        L = np.zeros(width)
        U = np.full(width, np.inf)
        ident = self.kinds == _IDENT
        neg = self.kinds == _NEG
        split = self.kinds == _SPLIT
        if (
            not np.all(np.isfinite(lb[ident]))
            or np.any(np.isfinite(lb[neg]))
            or not np.all(np.isfinite(ub[neg]))
            or np.any(np.isfinite(lb[split]) | np.isfinite(ub[split]))
        ):
            raise _LayoutMismatch("bound pattern differs from the model layout")
        L[self.cols[ident]] = lb[ident]
        U[self.cols[ident]] = ub[ident]
        L[self.cols[neg]] = -ub[neg]
        return L, U

    def _empty_rows_infeasible(self) -> bool:
        for i in self.empty_rows:
            rel, v = self.lp.relations[i], self.lp.b[i]
            if (rel == LE and v < -EPS_FEAS) or (rel == GE and v > EPS_FEAS) or (rel == EQ and abs(v) > EPS_FEAS):
                return True
        return False

    def solve(
        self,
        lb: np.ndarray | None = None,
        ub: np.ndarray | None = None,
        *,
        warm: WarmStart | None = None,
        deadline: float | None = None,
        keep_tableau: bool = False,
    ) -> tuple[LpSolution, WarmStart | None]:
        """Solve under bounds ``lb``/``ub`` (default: the model's own).

        Returns the solution and, when optimal and solved within this layout,
        a :class:`WarmStart` for later solves with nearby bounds.
        """
        lb = self.lp.lb if lb is None else np.asarray(lb, dtype=float)
        ub = self.lp.ub if ub is None else np.asarray(ub, dtype=float)
        if np.any(lb > ub) or self._empty_rows_infeasible():
            return LpSolution("Infeasible"), None
        try:
            L, U = self._box(lb, ub, self.N)
        except _LayoutMismatch:
            return SimplexModel(self.lp.with_bounds(lb, ub), self.pivot_rule).solve(deadline=deadline)[0], None
        tab = None
        if warm is not None and warm.model_id == id(self):
            tab = _Tableau.warm(self, L.copy(), U.copy(), warm, deadline)
        if tab is None:
            tab = _Tableau.cold(self, L, U, deadline)
            if tab is None:
                # these bounds need artificials the layout lacks
                return SimplexModel(self.lp.with_bounds(lb, ub), self.pivot_rule).solve(deadline=deadline)[0], None
            tab.two_phase()
        if tab.status != "Optimal":
            return LpSolution(tab.status, iterations=tab.iterations), None
        return tab.solution(), tab.warm_start(keep_tableau)


class _Tableau:
    """Rows ``0..m-1`` hold ``B^-1 A``; row ``m`` the reduced costs. ``x`` covers every column."""

    def __init__(self, model: SimplexModel, L: np.ndarray, U: np.ndarray, deadline: float | None):
        self.model = model
        self.m = model.m
        self.N = model.N
        self.L = L
        self.U = U
        self.deadline = deadline
        self.iterations = 0
        self.max_iter = 20000 + 50 * (self.m + self.N)
        self.bland_default = model.pivot_rule == "bland"
        self.status = "Optimal"
        self.is_art = np.zeros(self.N, dtype=bool)
        self.is_art[model.n_real :] = True

    @classmethod
    def cold(cls, model: SimplexModel, L, U, deadline) -> "_Tableau | None":
        t = cls(model, L, U, deadline)
        m, N = t.m, t.N
        x = L.copy()
        x[model.n_real :] = 0.0
        resid = model.b - model.A[:, : model.n_real] @ x[: model.n_real]
        basis = np.empty(m, dtype=int)
        for k in range(m):
            s = model.slack_of_row[k]
            if s >= 0 and resid[k] * model.A[k, s] >= 0:
                basis[k] = s
                x[s] = resid[k] / model.A[k, s]
            else:
                a = model.art_of_row[k]
                if a < 0 or resid[k] * model.A[k, a] < 0:
                    return None
                basis[k] = a
                x[a] = abs(resid[k])
        T = np.zeros((m + 1, N))
        T[:m] = model.A / model.A[np.arange(m), basis][:, None]
        t.T, t.x, t.basis = T, x, basis
        t.at_upper = np.zeros(N, dtype=bool)
        t.is_basic = np.zeros(N, dtype=bool)
        t.is_basic[basis] = True
        return t

    @classmethod
    def warm(cls, model: SimplexModel, L, U, ws: WarmStart, deadline) -> "_Tableau | None":
        t = cls(model, L, U, deadline)
        m, N = t.m, t.N
        t.L[t.is_art] = 0.0
        t.U[t.is_art] = 0.0
        t.basis = ws.basis.copy()
        t.is_basic = np.zeros(N, dtype=bool)
        t.is_basic[t.basis] = True
        t.at_upper = ws.at_upper & np.isfinite(t.U) & ~t.is_basic
        target = np.where(t.at_upper, t.U, t.L)
        if ws.tableau is not None:
            t.T = ws.tableau.copy()
            t.x = ws.x.copy()
            for j in np.nonzero(~t.is_basic & (target != t.x))[0]:
                t.x[t.basis] -= (target[j] - t.x[j]) * t.T[:m, j]
                t.x[j] = target[j]
        else:
            A = model.A
            t.x = target.copy()
            t.x[t.basis] = 0.0
            T = np.empty((m + 1, N))
            try:
                B = A[:, t.basis]
                T[:m] = np.linalg.solve(B, A)
                t.x[t.basis] = np.linalg.solve(B, model.b - A @ t.x)
            except np.linalg.LinAlgError:
                return None
            T[m] = model.c - model.c[t.basis] @ T[:m]
            t.T = T
        d = t.T[m]
        movable = ~t.is_basic & (t.U > t.L)
        dual_bad = movable & ((~t.at_upper & (d < -1e-7)) | (t.at_upper & (d > 1e-7)))
        try:
            if not dual_bad.any():
                t.status = t.dual()
                if t.status == "Optimal":
                    t.status = t.primal(~t.is_art)
                return t
            if t.primal_feasible():
                t.status = t.primal(~t.is_art)
                return t
        except NumericalFailure:
            return None
        return None

    def _tick(self) -> None:
        self.iterations += 1
        if self.iterations > self.max_iter:
            raise NumericalFailure("simplex iteration guard exceeded")
        if self.deadline is not None and self.iterations % 25 == 0 and time.monotonic() > self.deadline:
            raise SolverTimeout("LP deadline reached")

    def _pivot(self, r: int, q: int) -> None:
        T = self.T
        T[r] /= T[r, q]
        col = T[:, q].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        if nz.size:
            prow = T[r]
            jz = np.nonzero(prow)[0]
            if jz.size * 3 < prow.size:
                # flow rows are sparse; touch only the affected block
                T[np.ix_(nz, jz)] -= np.outer(col[nz], prow[jz])
            else:
                T[nz] -= np.outer(col[nz], prow)
        T[:, q] = 0.0
        T[r, q] = 1.0
        self.is_basic[self.basis[r]] = False
        self.is_basic[q] = True
        self.basis[r] = q

    def _set_costs(self, c: np.ndarray) -> None:
        self.T[self.m] = c - c[self.basis] @ self.T[: self.m]

    def primal_feasible(self) -> bool:
        xb = self.x[self.basis]
        tol = PRIMAL_TOL * (1.0 + np.abs(xb))
        return bool(np.all(xb >= self.L[self.basis] - tol) and np.all(xb <= self.U[self.basis] + tol))

    def primal(self, allowed: np.ndarray) -> str:
        T, m = self.T, self.m
        bland = self.bland_default
        streak = 0
        while True:
            self._tick()
            d = T[m]
            movable = allowed & ~self.is_basic & (self.U > self.L)
            cand = np.nonzero(movable & ((~self.at_upper & (d < -COST_TOL)) | (self.at_upper & (d > COST_TOL))))[0]
            if cand.size == 0:
                return "Optimal"
            q = int(cand[0]) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            sigma = -1.0 if self.at_upper[q] else 1.0
            alpha = sigma * T[:m, q]
            xb = self.x[self.basis]
            lo, hi = self.L[self.basis], self.U[self.basis]
            dec = np.nonzero(alpha > PIVOT_TOL)[0]
            inc = np.nonzero((alpha < -PIVOT_TOL) & np.isfinite(hi))[0]
            theta, r, hit_upper = np.inf, -1, False
            if dec.size or inc.size:
                ratios = np.maximum(
                    np.concatenate([(xb[dec] - lo[dec]) / alpha[dec], (hi[inc] - xb[inc]) / -alpha[inc]]), 0.0
                )
                rows = np.concatenate([dec, inc])
                best = ratios.min()
                ties = np.nonzero(ratios <= best + 1e-12 * max(1.0, best))[0]
                pick = ties[np.argmin(self.basis[rows[ties]])]
                theta, r, hit_upper = float(best), int(rows[pick]), bool(pick >= dec.size)
            span = self.U[q] - self.L[q]
            if span <= theta and np.isfinite(span):
                # bound flip: no basis change
                self.x[self.basis] -= sigma * span * T[:m, q]
                self.at_upper[q] = not self.at_upper[q]
                self.x[q] = self.U[q] if self.at_upper[q] else self.L[q]
                streak = 0
                continue
            if r < 0:
                return "Unbounded"
            if theta <= 1e-12:
                streak += 1
                if streak > DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0
            self.x[self.basis] -= sigma * theta * T[:m, q]
            self.x[q] += sigma * theta
            leaving = self.basis[r]
            self.x[leaving] = self.U[leaving] if hit_upper else self.L[leaving]
            self.at_upper[leaving] = hit_upper
            self._pivot(r, q)

    def dual(self) -> str:
        """Dual simplex from a dual feasible basis; ends Optimal or Infeasible."""
        T, m = self.T, self.m
        bland = self.bland_default
        streak = 0
        while True:
            self._tick()
            xb = self.x[self.basis]
            lo, hi = self.L[self.basis], self.U[self.basis]
            below, above = lo - xb, xb - hi
            infeas = np.maximum(below, above)
            bad = np.nonzero(infeas > PRIMAL_TOL * (1.0 + np.abs(xb)))[0]
            if bad.size == 0:
                return "Optimal"
            r = int(bad[np.argmin(self.basis[bad])]) if bland else int(bad[np.argmax(infeas[bad])])
            raising = below[r] > above[r]
            row = T[r]
            movable = ~self.is_basic & (self.U > self.L)
            up, down = row > PIVOT_TOL, row < -PIVOT_TOL
            if raising:
                target = lo[r]
                elig = movable & ((~self.at_upper & down) | (self.at_upper & up))
            else:
                target = hi[r]
                elig = movable & ((~self.at_upper & up) | (self.at_upper & down))
            cand = np.nonzero(elig)[0]
            if cand.size == 0:
                return "Infeasible"
            ratios = np.abs(T[m, cand]) / np.abs(row[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12 * max(1.0, best)]
            q = int(ties[0]) if bland else int(ties[np.argmax(np.abs(row[ties]))])
            if best <= 1e-12:
                streak += 1
                if streak > DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0
            delta = (xb[r] - target) / row[q]
            self.x[self.basis] -= delta * T[:m, q]
            self.x[q] += delta
            leaving = self.basis[r]
            self.x[leaving] = target
            self.at_upper[leaving] = not raising
            self._pivot(r, q)

    def two_phase(self) -> None:
        model = self.model
        if self.is_art[self.basis].any():
            self._set_costs(self.is_art.astype(float))
            self.primal(~self.is_art)
            scale = 1.0 + float(np.max(np.abs(model.b), initial=0.0))
            if float(self.x[self.is_art].sum()) > EPS_FEAS * scale:
                self.status = "Infeasible"
                return
        self.x[self.is_art] = 0.0
        self.L[self.is_art] = 0.0
        self.U[self.is_art] = 0.0
        self._set_costs(model.c)
        self.status = self.primal(~self.is_art)

    def solution(self) -> LpSolution:
        model = self.model
        lp = model.lp
        A, basis = model.A, self.basis
        x = self.x.copy()
        x_n = x.copy()
        x_n[basis] = 0.0
        try:
            B = A[:, basis]
            xb = np.linalg.solve(B, model.b - A @ x_n)
            y = np.linalg.solve(B.T, model.c[basis])
        except np.linalg.LinAlgError:
            raise NumericalFailure("singular final basis") from None
        if np.max(np.abs(xb - x[basis]), initial=0.0) < 1e-6 * (1 + np.max(np.abs(xb), initial=0.0)):
            x[basis] = xb
        near_lo = np.abs(x - self.L) <= 1e-11 * (1 + np.abs(self.L))
        x[near_lo] = self.L[near_lo]
        near_hi = np.isfinite(self.U) & (np.abs(x - self.U) <= 1e-11 * (1 + np.abs(self.U)))
        x[near_hi] = self.U[near_hi]

        kinds, cols = model.kinds, model.cols
        xu = x[cols].copy()
        xu[kinds == _NEG] *= -1.0
        split = kinds == _SPLIT
        xu[split] -= x[cols[split] + 1]
        duals = np.zeros(lp.n_rows)
        duals[model.rows] = model.sign * y
        duals[np.abs(duals) < 1e-12] = 0.0
        return LpSolution(
            "Optimal",
            x=xu,
            objective=float(lp.c @ xu),
            duals=duals,
            reduced_costs=lp.c - lp.A.T @ duals,
            iterations=self.iterations,
        )

    def warm_start(self, keep_tableau: bool) -> WarmStart:
        ws = WarmStart(id(self.model), self.basis.copy(), self.at_upper.copy())
        if keep_tableau:
            ws.tableau, ws.x = self.T, self.x
        return ws


def solve_lp(
    lp: LinearProgram,
    *,
    deadline: float | None = None,
    pivot_rule: str = "dantzig",
) -> LpSolution:
    """Solve ``lp`` to optimality, returning primal values and row duals.

    ``pivot_rule`` is ``"bland"`` (smallest-index entering column throughout)
    or ``"dantzig"`` (largest reduced cost, falling back to Bland's rule after
    a run of degenerate pivots). ``deadline`` is an absolute
    ``time.monotonic()`` value; passing it raises :class:`SolverTimeout`.
    """
    return SimplexModel(lp, pivot_rule).solve(deadline=deadline)[0]


def dual_objective(lp: LinearProgram, sol: LpSolution) -> float:
    """``b·y`` plus the bound terms priced by the reduced costs."""
    val = float(lp.b @ sol.duals)
    for j, d in enumerate(sol.reduced_costs):
        eff = d if lp.sense == "min" else -d
        if abs(eff) <= 1e-12:
            continue
        bound = lp.lb[j] if eff > 0 else lp.ub[j]
        val += d * bound
    return val
