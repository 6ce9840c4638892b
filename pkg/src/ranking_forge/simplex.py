"""Self-contained sparse revised simplex for the factor-revealing models.

Bounded-variable primal simplex on the slack-augmented standard form, with
a sparse LU factorization of the basis (refreshed periodically) and
product-form eta updates in between.  Dantzig pricing by default, falling
back to Bland's rule after a run of degenerate pivots so termination is
guaranteed.  Deterministic: identical inputs give identical pivot sequences
and iteration counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .gains import PriceTable
from .lpmodel import LpModel

INF = float("inf")


class SimplexStall(RuntimeError):
    """Numerical stall; re-run with pivot_rule='bland'."""


@dataclass
class SolverOptions:
    feasibility_tol: float = 1e-9
    optimality_tol: float = 1e-9
    max_iterations: int = 200_000
    pivot_rule: str = "dantzig"  # 'dantzig' (with Bland fallback) or 'bland'
    stall_limit: int = 1000  # degenerate pivots before the Bland fallback
    refactor_every: int = 64

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.optimality_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.pivot_rule not in ("dantzig", "bland"):
            raise ValueError("pivot_rule must be 'dantzig' or 'bland'")


@dataclass
class LpSolution:
    alpha: float
    alpha_i: tuple[float, ...]
    f_table: Optional[PriceTable]
    status: str  # 'optimal' | 'limit' | 'infeasible'
    iterations: int
    elapsed: float
    values: dict[str, float] = field(repr=False, default_factory=dict)

    @property
    def objective(self) -> float:
        return self.alpha


class _Basis:
    """B = A[:, basis]; solves go through a sparse LU plus an eta file."""

    def __init__(self, A: sp.csc_matrix, basis: np.ndarray):
        self.A = A
        self.m = A.shape[0]
        self.basis = basis
        self.etas: list[tuple[int, np.ndarray]] = []
        self.refactor()

    def refactor(self) -> None:
        B = self.A[:, self.basis].tocsc()
        self.lu = spla.splu(B)
        self.etas.clear()

    def ftran(self, v: np.ndarray) -> np.ndarray:
        z = self.lu.solve(v)
        for r, w in self.etas:
            zr = z[r] / w[r]
            if zr != 0.0:
                z = z - zr * w
            z[r] = zr
        return z

    def btran(self, v: np.ndarray) -> np.ndarray:
        y = v.copy()
        for r, w in reversed(self.etas):
            yr = (y[r] - (y @ w - y[r] * w[r])) / w[r]
            y[r] = yr
        return self.lu.solve(y, trans="T")

    def replace(self, row: int, col: int, w: np.ndarray) -> None:
        self.basis[row] = col
        self.etas.append((row, w))


@dataclass
class _StandardForm:
    A: sp.csc_matrix  # m x (n + m), slacks appended
    b: np.ndarray
    c: np.ndarray
    lo: np.ndarray
    up: np.ndarray
    n_struct: int


def _standard_form(model: LpModel) -> _StandardForm:
    n = len(model.var_names)
    m = len(model.rows)
    data, rows_idx, cols_idx = [], [], []
    b = np.zeros(m)
    slack_lo = np.zeros(m)
    slack_up = np.full(m, INF)
    for i, row in enumerate(model.rows):
        for j, coef in row.coeffs:
            rows_idx.append(i)
            cols_idx.append(j)
            data.append(float(coef))
        b[i] = float(row.rhs)
        if row.sense == "E":
            slack_up[i] = 0.0
        elif row.sense != "L":
            raise ValueError(f"unsupported row sense {row.sense!r}")
        rows_idx.append(i)
        cols_idx.append(n + i)
        data.append(1.0)
    A = sp.csc_matrix(
        (np.asarray(data), (np.asarray(rows_idx), np.asarray(cols_idx))),
        shape=(m, n + m),
    )
    lo = np.concatenate([np.array([float(x) for x in model.lower]), slack_lo])
    up = np.concatenate(
        [np.array([INF if x is None else float(x) for x in model.upper]), slack_up]
    )
    c = np.zeros(n + m)
    c[model.objective_var] = 1.0
    return _StandardForm(A, b, c, lo, up, n)


class _Core:
    """One simplex run (used for both phases)."""

    def __init__(self, sf: _StandardForm, opts: SolverOptions):
        self.sf = sf
        self.opts = opts
        m = sf.A.shape[0]
        total = sf.A.shape[1]
        self.m = m
        self.total = total
        self.at_upper = np.zeros(total, dtype=bool)
        self.in_basis = np.zeros(total, dtype=bool)
        basis = np.arange(sf.n_struct, sf.n_struct + m)
        self.in_basis[basis] = True
        self.x = np.where(np.isfinite(sf.lo), sf.lo, 0.0)
        self.B = _Basis(sf.A, basis)
        self.AT = sf.A.T.tocsr()
        self.recompute_basics()
        self.iterations = 0
        self.degenerate_run = 0
        self.forced_bland = False

    def recompute_basics(self) -> None:
        rhs = self.sf.b - self.sf.A @ np.where(self.in_basis, 0.0, self.x)
        self.x[self.B.basis] = self.B.ftran(rhs)

    def primal_feasible(self, tol: float) -> bool:
        xb = self.x[self.B.basis]
        lo = self.sf.lo[self.B.basis]
        up = self.sf.up[self.B.basis]
        return bool(np.all(xb >= lo - tol) and np.all(xb <= up + tol))

    def run(self, c: np.ndarray, max_iterations: int) -> str:
        opts = self.opts
        tol = opts.optimality_tol
        while True:
            if self.iterations >= max_iterations:
                return "limit"
            y = self.B.btran(c[self.B.basis])
            d = c - self.AT @ y
            eligible = ~self.in_basis & (
                (~self.at_upper & (d > tol)) | (self.at_upper & (d < -tol))
            )
            # Nonbasic fixed variables (lo == up) can never improve anything.
            eligible &= self.sf.lo != self.sf.up
            idx = np.nonzero(eligible)[0]
            if idx.size == 0:
                return "optimal"
            use_bland = opts.pivot_rule == "bland" or self.forced_bland
            if use_bland:
                e = int(idx[0])
            else:
                e = int(idx[np.argmax(np.abs(d[idx]))])
            self._step(e)
            self.iterations += 1
            if (
                not use_bland
                and self.degenerate_run > opts.stall_limit
            ):
                self.forced_bland = True

    def _step(self, e: int) -> None:
        sf = self.sf
        sign = -1.0 if self.at_upper[e] else 1.0
        col = np.asarray(sf.A[:, e].todense()).ravel()
        w = self.B.ftran(col)
        basis = self.B.basis
        xb = self.x[basis]
        step_dir = sign * w
        feas = self.opts.feasibility_tol
        pivot_tol = 1e-10

        # Blocking ratios from basic variables.
        limit = INF
        leave_row = -1
        dec = step_dir > pivot_tol
        inc = step_dir < -pivot_tol
        ratios = np.full(self.m, INF)
        lo_b = sf.lo[basis]
        up_b = sf.up[basis]
        ratios[dec] = (xb[dec] - lo_b[dec]) / step_dir[dec]
        with np.errstate(invalid="ignore"):
            ratios[inc] = np.where(
                np.isfinite(up_b[inc]), (xb[inc] - up_b[inc]) / step_dir[inc], INF
            )
        ratios = np.maximum(ratios, 0.0)
        if np.any(np.isfinite(ratios)):
            limit = float(ratios.min())
            blockers = np.nonzero(ratios <= limit + feas)[0]
            if self.forced_bland or self.opts.pivot_rule == "bland":
                # Smallest variable index among the blockers (Bland).
                leave_row = int(blockers[np.argmin(basis[blockers])])
            else:
                # Largest pivot magnitude for stability.
                leave_row = int(blockers[np.argmax(np.abs(step_dir[blockers]))])

        span = sf.up[e] - sf.lo[e]
        if span <= limit:
            # Bound flip: the entering variable crosses to its other bound.
            if not np.isfinite(span):
                raise SimplexStall("unbounded direction; model must be bounded")
            self.x[basis] = xb - step_dir * span
            self.x[e] = sf.lo[e] if self.at_upper[e] else sf.up[e]
            self.at_upper[e] = ~self.at_upper[e]
            self.degenerate_run = 0 if span > feas else self.degenerate_run + 1
            return
        if leave_row < 0:
            raise SimplexStall("no blocking variable; model must be bounded")
        t = limit
        leaving = int(basis[leave_row])
        self.x[basis] = xb - step_dir * t
        self.x[e] = (sf.up[e] - t) if self.at_upper[e] else (sf.lo[e] + t)
        # Leaving variable settles on the bound it hit.
        hit_upper = step_dir[leave_row] < 0
        self.x[leaving] = sf.up[leaving] if hit_upper else sf.lo[leaving]
        self.at_upper[leaving] = bool(hit_upper)
        self.in_basis[leaving] = False
        self.in_basis[e] = True
        self.at_upper[e] = False
        self.B.replace(leave_row, e, w)
        self.degenerate_run = 0 if t > feas else self.degenerate_run + 1
        if len(self.B.etas) >= self.opts.refactor_every:
            self.B.refactor()
            self.recompute_basics()


def solve(model: LpModel, opts: SolverOptions | None = None) -> LpSolution:
    """Maximize the model's objective variable.

    Starts from the all-slack basis (feasible for every model the factory
    builds); falls back to a phase-1 artificial objective otherwise.
    """
    opts = opts or SolverOptions()
    start = time.perf_counter()
    sf = _standard_form(model)
    core = _Core(sf, opts)

    if not core.primal_feasible(opts.feasibility_tol):
        status = _phase_one(core, opts)
        if status == "limit":
            return _package(model, core, "limit", start)
        if not core.primal_feasible(10 * opts.feasibility_tol):
            return _package(model, core, "infeasible", start)

    status = core.run(sf.c, opts.max_iterations)
    # One clean refactorization before reading the answer off.
    core.B.refactor()
    core.recompute_basics()
    return _package(model, core, status, start)


def _phase_one(core: _Core, opts: SolverOptions) -> str:
    """Drive infeasible basic slacks back into range.

    Each violated basic variable gets its violated bound widened to the
    current value and the opposite bound pinned to the true violated bound,
    so maximizing the recovery objective pushes it exactly onto the bound it
    must reach and no further.
    """
    sf = core.sf
    basis = core.B.basis
    xb = core.x[basis]
    relaxed_lo = sf.lo.copy()
    relaxed_up = sf.up.copy()
    c1 = np.zeros(core.total)
    low_violators: list[int] = []
    up_violators: list[int] = []
    for row, j in enumerate(basis):
        if xb[row] < sf.lo[j] - opts.feasibility_tol:
            relaxed_lo[j] = xb[row]
            relaxed_up[j] = sf.lo[j]
            c1[j] = 1.0
            low_violators.append(j)
        elif xb[row] > sf.up[j] + opts.feasibility_tol:
            relaxed_up[j] = xb[row]
            relaxed_lo[j] = sf.up[j]
            c1[j] = -1.0
            up_violators.append(j)
    true_lo, true_up = sf.lo.copy(), sf.up.copy()
    sf.lo, sf.up = relaxed_lo, relaxed_up
    try:
        status = core.run(c1, opts.max_iterations)
    finally:
        sf.lo, sf.up = true_lo, true_up
    # A recovered variable that went nonbasic sits on a relaxed bound that
    # coincides with one of its true bounds; fix the status flags to match.
    for j in low_violators:
        if not core.in_basis[j] and abs(core.x[j] - true_lo[j]) <= opts.feasibility_tol:
            core.at_upper[j] = False
            core.x[j] = true_lo[j]
    for j in up_violators:
        if not core.in_basis[j] and abs(core.x[j] - true_up[j]) <= opts.feasibility_tol:
            core.at_upper[j] = True
            core.x[j] = true_up[j]
    core.recompute_basics()
    return status


def _package(model, core, status, start) -> LpSolution:
    names = model.var_names
    values = {names[j]: float(core.x[j]) for j in range(len(names))}
    alpha = values.get("alpha", float(core.x[model.objective_var]))
    k = model.k
    alpha_i = tuple(values.get(f"alpha_{i}", 0.0) for i in range(1, k + 1))
    f_table = _extract_table(model, values)
    return LpSolution(
        alpha=alpha,
        alpha_i=alpha_i,
        f_table=f_table,
        status=status,
        iterations=core.iterations,
        elapsed=time.perf_counter() - start,
        values=values,
    )


def _extract_table(model: LpModel, values: dict[str, float]) -> Optional[PriceTable]:
    k = model.k
    try:
        rows = [
            [min(1.0, max(0.0, values[f"f_{i}_{j}"])) for j in range(1, k + 2)]
            for i in range(1, k + 2)
        ]
    except KeyError:
        return None
    return PriceTable(k, rows)


# ---------------------------------------------------------------------------
# Verification in exact arithmetic.


@dataclass
class VerifyReport:
    max_row_violation: float
    max_bound_violation: float
    objective_gap: float
    worst_row: Optional[str]
    ok: bool


def verify_solution(model: LpModel, solution: LpSolution, tol: float = 1e-8) -> VerifyReport:
    """Recompute all residuals from the model's exact coefficients.

    Solution values convert to exact rationals, so the only approximation
    left is whatever error the solver itself committed.
    """
    values: list[Fraction] = []
    for name in model.var_names:
        if name not in solution.values:
            raise ValueError(f"solution is missing a value for variable {name}")
        values.append(Fraction(solution.values[name]))
    worst = Fraction(0)
    worst_row = None
    for row in model.rows:
        lhs = sum(Fraction(c) * values[j] for j, c in row.coeffs)
        rhs = Fraction(row.rhs)
        viol = abs(lhs - rhs) if row.sense == "E" else max(Fraction(0), lhs - rhs)
        if viol > worst:
            worst, worst_row = viol, row.name
    bound_viol = Fraction(0)
    for j, name in enumerate(model.var_names):
        lo, up = Fraction(model.lower[j]), model.upper[j]
        bound_viol = max(bound_viol, lo - values[j])
        if up is not None:
            bound_viol = max(bound_viol, values[j] - Fraction(up))
    gap = abs(values[model.objective_var] - Fraction(solution.alpha))
    ok = max(worst, bound_viol, gap) <= Fraction(tol)
    return VerifyReport(float(worst), float(bound_viol), float(gap), worst_row, ok)


def parse_solution_text(text: str) -> dict[str, float]:
    """Read a ``name=value`` per line assignment (external solver output)."""
    values: dict[str, float] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, raw = line.partition("=")
        if not _:
            raise ValueError(f"expected 'name=value', got {line!r}")
        values[name.strip()] = float(raw)
    return values


def solution_from_values(model: LpModel, values: dict[str, float]) -> LpSolution:
    """Wrap an externally produced assignment for verification."""
    alpha = values.get("alpha", 0.0)
    alpha_i = tuple(values.get(f"alpha_{i}", 0.0) for i in range(1, model.k + 1))
    return LpSolution(
        alpha=alpha,
        alpha_i=alpha_i,
        f_table=_extract_table(model, values),
        status="external",
        iterations=0,
        elapsed=0.0,
        values=values,
    )


# ---------------------------------------------------------------------------
# Tiny-scale oracle: enumerate candidate vertices of the polytope directly.


def brute_force_optimum(
    model: LpModel, max_vars: int = 12, chunk: int = 65536
) -> float:
    """Exact optimum by enumerating active-constraint subsets.

    Works in the structural-variable space: every vertex of the feasible
    polytope is the solution of n linearly independent active constraints
    drawn from the rows and the variable bounds.  Refuses models with more
    than ``max_vars`` structural variables.
    """
    n = len(model.var_names)
    if n > max_vars:
        raise ValueError(f"{n} variables exceeds the oracle limit {max_vars}")
    rows = []
    rhs = []
    senses = []
    for row in model.rows:
        a = np.zeros(n)
        for j, coef in row.coeffs:
            a[j] = float(coef)
        rows.append(a)
        rhs.append(float(row.rhs))
        senses.append(row.sense)
    lo = np.array([float(x) for x in model.lower])
    up = np.array([INF if x is None else float(x) for x in model.upper])
    G = []
    h = []
    for a, b_val in zip(rows, rhs):
        G.append(a)
        h.append(b_val)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        G.append(e.copy())
        h.append(lo[j])
        if np.isfinite(up[j]):
            G.append(e)
            h.append(up[j])
    G = np.asarray(G)
    h = np.asarray(h)
    A_rows = np.asarray(rows)
    b_rows = np.asarray(rhs)
    eq_mask = np.array([s == "E" for s in senses])
    c = np.zeros(n)
    c[model.objective_var] = 1.0

    best = -INF
    combos = combinations(range(len(G)), n)
    while True:
        batch = [list(cmb) for _, cmb in zip(range(chunk), combos)]
        if not batch:
            break
        idx = np.asarray(batch)
        mats = G[idx]
        rhs_b = h[idx]
        dets = np.abs(np.linalg.det(mats))
        good = dets > 1e-9
        if not np.any(good):
            continue
        sols = np.linalg.solve(mats[good], rhs_b[good][..., None])[..., 0]
        vals = A_rows @ sols.T
        feas = np.all(vals <= b_rows[:, None] + 1e-9, axis=0)
        feas &= np.all(
            np.abs(vals[eq_mask] - b_rows[eq_mask, None]) <= 1e-9, axis=0
        )
        feas &= np.all(sols >= lo[None, :] - 1e-9, axis=1)
        feas &= np.all(sols <= up[None, :] + 1e-9, axis=1)
        if np.any(feas):
            best = max(best, float((sols[feas] @ c).max()))
    if best == -INF:
        raise RuntimeError("no feasible vertex found")
    return best
