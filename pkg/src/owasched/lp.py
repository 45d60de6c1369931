"""Small dense linear-programming core.

Two-phase tableau simplex with Bland's rule, which cannot cycle and gives
the same pivots for the same input.  Meant for desk-scale programs (a few
hundred variables and rows); this is the only floating-point code in the
package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LPError

TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass
class LinearProgram:
    """``sense`` c.x subject to rows ``A[r] . x  (<=|=|>=)  b[r]`` and
    ``lo <= x <= hi`` (``hi`` may be ``inf``, ``lo`` must be finite)."""

    c: np.ndarray
    A: np.ndarray
    relations: list[str]
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    sense: str = "min"
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.shape[0]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        m = self.A.shape[0]
        if self.b.shape != (m,) or len(self.relations) != m:
            raise ValueError("row count mismatch between A, b and relations")
        if self.lo.shape != (n,) or self.hi.shape != (n,):
            raise ValueError("bounds must have one entry per variable")
        if not np.all(np.isfinite(self.lo)):
            raise ValueError("lower bounds must be finite")
        if any(r not in ("<=", "=", ">=") for r in self.relations):
            raise ValueError("relations must be '<=', '=' or '>='")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        if not self.names:
            self.names = [f"x{j}" for j in range(n)]

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]


class LPBuilder:
    """Incremental construction with named variables and sparse rows."""

    def __init__(self, sense: str = "min"):
        self.sense = sense
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.cost: list[float] = []
        self.lo: list[float] = []
        self.hi: list[float] = []
        self.rows: list[dict[int, float]] = []
        self.relations: list[str] = []
        self.rhs: list[float] = []

    def var(self, name: str, lo: float = 0.0, hi: float = math.inf, cost: float = 0.0) -> int:
        if name in self.index:
            raise ValueError(f"duplicate variable {name}")
        self.index[name] = len(self.names)
        self.names.append(name)
        self.cost.append(float(cost))
        self.lo.append(float(lo))
        self.hi.append(float(hi))
        return self.index[name]

    def add_cost(self, j: int, value: float) -> None:
        self.cost[j] += float(value)

    def row(self, coeffs: dict[int, float], relation: str, rhs: float) -> None:
        merged: dict[int, float] = {}
        for j, a in coeffs.items():
            merged[j] = merged.get(j, 0.0) + float(a)
        self.rows.append(merged)
        self.relations.append(relation)
        self.rhs.append(float(rhs))

    def build(self) -> LinearProgram:
        A = np.zeros((len(self.rows), len(self.names)))
        for r, coeffs in enumerate(self.rows):
            for j, a in coeffs.items():
                A[r, j] = a
        return LinearProgram(np.array(self.cost), A, list(self.relations), np.array(self.rhs),
                             np.array(self.lo), np.array(self.hi), self.sense, list(self.names))


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float = math.nan
    x: np.ndarray | None = None
    pivots: int = 0


def _pivot(T: np.ndarray, r: int, col: int) -> None:
    T[r] /= T[r, col]
    factors = T[:, col].copy()
    factors[r] = 0.0
    T -= np.outer(factors, T[r])


def _bland(T: np.ndarray, basis: list[int], allowed: int, max_iter: int, counter: list[int]) -> str:
    """Run Bland's rule on tableau ``T`` (last row = reduced costs, last
    column = rhs) over the first ``allowed`` columns."""
    m = T.shape[0] - 1
    while True:
        if counter[0] >= max_iter:
            raise LPError(f"simplex iteration limit {max_iter} exceeded")
        red = T[-1, :allowed]
        entering = next((j for j in range(allowed) if red[j] < -TOL), None)
        if entering is None:
            return "optimal"
        col = T[:m, entering]
        best_r, best_ratio = None, math.inf
        for r in range(m):
            if col[r] > TOL:
                ratio = T[r, -1] / col[r]
                if ratio < best_ratio - TOL or (
                    abs(ratio - best_ratio) <= TOL and basis[r] < basis[best_r]
                ):
                    best_r, best_ratio = r, ratio
        if best_r is None:
            return "unbounded"
        _pivot(T, best_r, entering)
        basis[best_r] = entering
        counter[0] += 1


def lp_solve(lp: LinearProgram, max_iter: int = 200_000) -> LpSolution:
    """Solve ``lp``; infeasible or unbounded programs come back as a status."""
    n = lp.num_vars
    sign = 1.0 if lp.sense == "min" else -1.0
    c = sign * lp.c
    # shift x = lo + y so every variable is y >= 0
    b = lp.b - lp.A @ lp.lo
    const = float(c @ lp.lo)
    rows = [lp.A[r].copy() for r in range(lp.num_rows)]
    rel = list(lp.relations)
    rhs = list(b)
    for j in range(n):
        if math.isfinite(lp.hi[j]):
            e = np.zeros(n)
            e[j] = 1.0
            rows.append(e)
            rel.append("<=")
            rhs.append(lp.hi[j] - lp.lo[j])
    m = len(rows)
    for r in range(m):
        if rhs[r] < 0:
            rows[r] = -rows[r]
            rhs[r] = -rhs[r]
            rel[r] = {"<=": ">=", ">=": "<=", "=": "="}[rel[r]]
    n_slack = sum(1 for x in rel if x != "=")
    n_art = sum(1 for x in rel if x != "<=")
    width = n + n_slack + n_art
    T = np.zeros((m + 1, width + 1))
    basis = [0] * m
    s = n
    a = n + n_slack
    art_cols = []
    for r in range(m):
        T[r, :n] = rows[r]
        T[r, -1] = rhs[r]
        if rel[r] == "<=":
            T[r, s] = 1.0
            basis[r] = s
            s += 1
        else:
            if rel[r] == ">=":
                T[r, s] = -1.0
                s += 1
            T[r, a] = 1.0
            basis[r] = a
            art_cols.append(a)
            a += 1
    counter = [0]
    # phase 1: minimise the sum of artificials
    if art_cols:
        T[-1, :] = 0.0
        for col in art_cols:
            T[-1, col] = 1.0
        for r in range(m):
            if basis[r] in art_cols:
                T[-1] -= T[r]
        _bland(T, basis, width, max_iter, counter)
        if -T[-1, -1] > FEAS_TOL * max(1.0, float(np.abs(rhs).max(initial=0.0))):
            return LpSolution("infeasible", pivots=counter[0])
        first_art = n + n_slack
        keep = []
        for r in range(m):
            if basis[r] >= first_art:
                col = next((j for j in range(first_art) if abs(T[r, j]) > TOL), None)
                if col is None:
                    continue  # redundant row
                _pivot(T, r, col)
                basis[r] = col
            keep.append(r)
        T = np.vstack([T[keep][:, list(range(first_art)) + [width]], np.zeros((1, first_art + 1))])
        basis = [basis[r] for r in keep]
        width = first_art
    # phase 2
    T[-1, :] = 0.0
    T[-1, :n] = c
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status = _bland(T, basis, width, max_iter, counter)
    if status == "unbounded":
        return LpSolution("unbounded", pivots=counter[0])
    y = np.zeros(width)
    for r, j in enumerate(basis):
        y[j] = T[r, -1]
    x = lp.lo + y[:n]
    value = float(lp.c @ x)
    _check_feasible(lp, x)
    return LpSolution("optimal", value, x, counter[0])


def residual(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest constraint or bound violation of ``x``."""
    ax = lp.A @ x
    worst = 0.0
    for r, rel in enumerate(lp.relations):
        if rel == "<=":
            worst = max(worst, ax[r] - lp.b[r])
        elif rel == ">=":
            worst = max(worst, lp.b[r] - ax[r])
        else:
            worst = max(worst, abs(ax[r] - lp.b[r]))
    worst = max(worst, float(np.max(lp.lo - x, initial=0.0)))
    finite = np.isfinite(lp.hi)
    if finite.any():
        worst = max(worst, float(np.max(x[finite] - lp.hi[finite], initial=0.0)))
    return worst


def _check_feasible(lp: LinearProgram, x: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(lp.b).max(initial=0.0)))
    if residual(lp, x) > FEAS_TOL * scale:
        raise LPError(f"simplex returned a point with residual {residual(lp, x):.3g}")


def theta_lp_pair(f: Sequence[float], k: int) -> tuple[LinearProgram, LinearProgram]:
    """Primal/dual programs whose common optimum is the sum of the ``k``
    largest entries of ``f``.

    Primal: min sum(u) - (K-k) r  s.t.  r <= u_i, u_i >= f_i, u, r >= 0.
    Dual:   max sum(beta_i f_i)  s.t.  alpha_i + beta_i <= 1,
            sum(alpha) >= K-k, alpha, beta >= 0.
    """
    K = len(f)
    if not 1 <= k <= K:
        raise ValueError(f"k must be in 1..{K}, got {k}")
    primal = LPBuilder("min")
    u = [primal.var(f"u{i + 1}", cost=1.0) for i in range(K)]
    r = primal.var("r", cost=-(K - k))
    for i in range(K):
        primal.row({r: 1.0, u[i]: -1.0}, "<=", 0.0)
        primal.row({u[i]: 1.0}, ">=", float(f[i]))
    dual = LPBuilder("max")
    alpha = [dual.var(f"alpha{i + 1}") for i in range(K)]
    beta = [dual.var(f"beta{i + 1}", cost=float(f[i])) for i in range(K)]
    for i in range(K):
        dual.row({alpha[i]: 1.0, beta[i]: 1.0}, "<=", 1.0)
    dual.row({a: 1.0 for a in alpha}, ">=", float(K - k))
    return primal.build(), dual.build()


def to_lp_format(lp: LinearProgram) -> str:
    """CPLEX LP text, for cross-checking with external solvers."""

    def expr(coeffs) -> str:
        parts = []
        for j, a in coeffs:
            if a == 0:
                continue
            parts.append(f"{'-' if a < 0 else '+'} {abs(a):.17g} {lp.names[j]}")
        text = " ".join(parts) if parts else "0 " + lp.names[0]
        return text[2:] if text.startswith("+ ") else text

    lines = ["Minimize" if lp.sense == "min" else "Maximize",
             " obj: " + expr(enumerate(lp.c)), "Subject To"]
    for r in range(lp.num_rows):
        rel = {"<=": "<=", ">=": ">=", "=": "="}[lp.relations[r]]
        lines.append(f" c{r + 1}: {expr(enumerate(lp.A[r]))} {rel} {lp.b[r]:.17g}")
    lines.append("Bounds")
    for j, name in enumerate(lp.names):
        hi = "+inf" if not math.isfinite(lp.hi[j]) else f"{lp.hi[j]:.17g}"
        lines.append(f" {lp.lo[j]:.17g} <= {name} <= {hi}")
    lines.append("End")
    return "\n".join(lines) + "\n"
