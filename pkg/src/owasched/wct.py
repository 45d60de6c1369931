"""Solvers for the weighted sum of completion times under OWA."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import LPError, ObjectiveMismatchError, UnsupportedError
from .lp import LinearProgram, LPBuilder, LpSolution, lp_solve
from .model import (
    Instance,
    Objective,
    Schedule,
    SolveReport,
    completion_times,
    cost_vector,
    invert_instance,
    invert_schedule,
)
from .owa import OwaWeights, deviation_weights, owa_value, preset

ROUNDING_SLACK = 1e-6


def _require_wct(inst: Instance) -> None:
    if inst.objective is not Objective.WEIGHTED_COMPLETION_SUM:
        raise ObjectiveMismatchError("this solver needs a weighted completion time instance")


def _report(inst: Instance, sched: Schedule, v: OwaWeights, method: str, **kw) -> SolveReport:
    costs = cost_vector(inst, sched)
    return SolveReport(sched, owa_value(v, costs), method=method, costs=costs, **kw)


def solve_deterministic_wspt(p: Sequence, w: Sequence, precedence=()) -> Schedule:
    """Smith's ratio rule; zero-weight jobs go last, ties by job index."""
    if precedence:
        raise UnsupportedError(
            "WSPT ignores precedence; use testkit.oracle_deterministic_wct for small instances"
        )
    inf = (1, Fraction(0))

    def key(j):
        if w[j] == 0:
            return (inf, j)
        return ((0, Fraction(p[j]) / Fraction(w[j])), j)

    return Schedule(sorted(range(len(p)), key=key))


def solve_deterministic_wct(p: Sequence, w: Sequence, precedence=(), cap: int = 9) -> Schedule:
    """Exact single-scenario optimum: WSPT without precedence, brute force
    for small constrained instances."""
    if not precedence:
        return solve_deterministic_wspt(p, w)
    if len(p) > cap:
        raise UnsupportedError(
            f"precedence-constrained 1|prec|sum wC with n={len(p)} > {cap} is not supported"
        )
    from .testkit import oracle_deterministic_wct

    return oracle_deterministic_wct(p, w, precedence, cap)


def solve_min_min_wct(inst: Instance) -> SolveReport:
    """Best of the per-scenario optimal schedules."""
    _require_wct(inst)
    best = None
    for i in range(inst.k):
        sched = solve_deterministic_wct(inst.scenario_column(inst.proc, i),
                                        inst.scenario_column(inst.weight, i), inst.precedence)
        own = cost_vector(inst, sched)[i]
        if best is None or own < best[0]:
            best = (own, sched)
    return _report(inst, best[1], preset("minimum", inst.k), "wct-minmin",
                   stats={"scenarios_solved": inst.k})


@dataclass(frozen=True)
class AggregatedInstance:
    """Deterministic surrogate: summed processing times, OWA-aggregated weights."""

    proc_hat: tuple[Fraction, ...]
    weight_hat: tuple[Fraction, ...]
    precedence: frozenset[tuple[int, int]]

    def solve(self) -> Schedule:
        return solve_deterministic_wct(self.proc_hat, self.weight_hat, self.precedence)


def aggregate_instance(inst: Instance, v: OwaWeights) -> AggregatedInstance:
    return AggregatedInstance(
        tuple(sum(row, Fraction(0)) for row in inst.proc),
        tuple(owa_value(v, row) for row in inst.weight),
        inst.precedence,
    )


def _ratio(values) -> Fraction | None:
    lo, hi = min(values), max(values)
    if lo == 0:
        return None
    return hi / lo


def aggregate_guarantee(inst: Instance) -> Fraction | None:
    """``K * min(w_max/w_min, p_max/p_min)``; ``None`` when both ratios are undefined."""
    ratios = [r for r in (_ratio([x for row in inst.weight for x in row]),
                          _ratio([x for row in inst.proc for x in row])) if r is not None]
    return inst.k * min(ratios) if ratios else None


def approx_aggregate(inst: Instance, v: OwaWeights) -> SolveReport:
    """Solve the aggregated deterministic instance, both directly and after
    swapping processing times with weights, and keep the better schedule."""
    _require_wct(inst)
    if not v.is_nonincreasing():
        raise ValueError("the aggregate approximation needs nonincreasing OWA weights")
    direct = aggregate_instance(inst, v).solve()
    inverted = invert_schedule(aggregate_instance(invert_instance(inst), v).solve())
    best = min((direct, inverted), key=lambda s: (owa_value(v, cost_vector(inst, s)), s.order))
    return _report(inst, best, v, "wct-aggregate", guarantee=aggregate_guarantee(inst),
                   extra={"picked": "direct" if best == direct else "inverted"})


# ------------------------------------------------------------ LP relaxation

@dataclass
class OwaLP:
    """The relaxation plus the bookkeeping needed to read it back."""

    lp: LinearProgram
    n: int
    k: int
    proc: tuple[Fraction, ...]
    delta: dict[tuple[int, int], int]

    def completion_times(self, x: np.ndarray) -> list[float]:
        p = [float(q) for q in self.proc]
        return [p[j] + sum(x[self.delta[i, j]] * p[i] for i in range(self.n) if i != j)
                for j in range(self.n)]

    def fix_order(self, sched: Schedule) -> LinearProgram:
        """Copy of the relaxation with every delta pinned to ``sched``."""
        lo, hi = self.lp.lo.copy(), self.lp.hi.copy()
        pos = sched.positions()
        for (i, j), col in self.delta.items():
            lo[col] = hi[col] = 1.0 if pos[i] < pos[j] else 0.0
        return LinearProgram(self.lp.c, self.lp.A, self.lp.relations, self.lp.b, lo, hi,
                             self.lp.sense, self.lp.names)


def build_owa_lp(inst: Instance, v: OwaWeights) -> OwaLP:
    """Linear-ordering relaxation of the deviation-model MIP.

    Needs processing times equal across scenarios and nonincreasing ``v``.
    ``delta[i, j]`` stands for "i before j"; completion times are substituted
    out as ``C_j = p_j + sum_i delta_ij p_i``.
    """
    _require_wct(inst)
    if not inst.deterministic_proc():
        hint = " (weights are deterministic: invert the instance first)" if inst.deterministic_weight() else ""
        raise UnsupportedError("the LP relaxation needs deterministic processing times" + hint)
    dev = deviation_weights(v)
    if not dev.all_nonnegative:
        raise ValueError("the LP relaxation needs nonincreasing OWA weights")
    n, K = inst.n, inst.k
    p = tuple(row[0] for row in inst.proc)
    b = LPBuilder("min")
    delta = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                delta[i, j] = b.var(f"d_{i + 1}_{j + 1}", 0.0, 1.0)
    u = {(i, k): b.var(f"u_{i + 1}_{k + 1}") for i in range(K) for k in range(K)}
    r = {k: b.var(f"r_{k + 1}") for k in range(K)}
    for k in range(K):
        vk = float(dev.values[k])
        for i in range(K):
            b.add_cost(u[i, k], vk)
        b.add_cost(r[k], -vk * (K - (k + 1)))
    for i in range(n):
        for j in range(i + 1, n):
            b.row({delta[i, j]: 1.0, delta[j, i]: 1.0}, "=", 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                b.row({delta[i, j]: 1.0, delta[j, l]: 1.0, delta[l, i]: 1.0}, ">=", 1.0)
                b.row({delta[i, l]: 1.0, delta[l, j]: 1.0, delta[j, i]: 1.0}, ">=", 1.0)
    for a, c in sorted(inst.precedence):
        b.row({delta[a, c]: 1.0}, "=", 1.0)
    for k in range(K):
        for i in range(K):
            b.row({r[k]: 1.0, u[i, k]: -1.0}, "<=", 0.0)
    for i in range(K):
        w = [float(row[i]) for row in inst.weight]
        base = sum(w[j] * float(p[j]) for j in range(n))
        for k in range(K):
            coeffs = {u[i, k]: 1.0}
            for (a, j), col in delta.items():
                coeffs[col] = coeffs.get(col, 0.0) - w[j] * float(p[a])
            b.row(coeffs, ">=", base)
    return OwaLP(b.build(), n, K, p, delta)


def _round_order(inst: Instance, cstar: Sequence[float]) -> Schedule:
    """Jobs by nondecreasing LP completion time, never breaking precedence."""
    preds_left = [0] * inst.n
    succ = inst.successors()
    for _, c in inst.precedence:
        preds_left[c] += 1
    key = [(round(x, 9), j) for j, x in enumerate(cstar)]
    ready = [key[j] for j in range(inst.n) if preds_left[j] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, j = heapq.heappop(ready)
        order.append(j)
        for c in succ[j]:
            preds_left[c] -= 1
            if preds_left[c] == 0:
                heapq.heappush(ready, key[c])
    return Schedule(order)


def approx_lp_rounding(inst: Instance, v: OwaWeights) -> SolveReport:
    """Order jobs by the completion times of the LP relaxation.

    The schedule's OWA value is at most twice the LP optimum, which itself
    bounds the true optimum from below.  With scenario-dependent processing
    times but fixed weights the instance is inverted first.
    """
    _require_wct(inst)
    if not v.is_nonincreasing():
        raise ValueError("LP rounding needs nonincreasing OWA weights")
    if not inst.deterministic_proc():
        if not inst.deterministic_weight():
            raise UnsupportedError("LP rounding needs deterministic processing times or weights")
        rep = approx_lp_rounding(invert_instance(inst), v)
        sched = invert_schedule(rep.schedule)
        return _report(inst, sched, v, "wct-lp2", lower_bound=rep.lower_bound, guarantee=Fraction(2),
                       stats=rep.stats, extra={**rep.extra, "inverted": True})
    model = build_owa_lp(inst, v)
    sol: LpSolution = lp_solve(model.lp)
    if sol.status != "optimal":
        raise LPError(f"relaxation came back {sol.status}; the formulation is broken")
    cstar = model.completion_times(sol.x)
    sched = _round_order(inst, cstar)
    rep = _report(inst, sched, v, "wct-lp2", lower_bound=sol.value, guarantee=Fraction(2),
                  stats={"lp_pivots": sol.pivots, "lp_rows": model.lp.num_rows,
                         "lp_vars": model.lp.num_vars},
                  extra={"lp_completion_times": cstar, "inverted": False})
    actual = completion_times(inst, sched, 0)
    for j in range(inst.n):
        if float(actual[j]) > 2 * cstar[j] * (1 + ROUNDING_SLACK) + ROUNDING_SLACK:
            raise LPError(f"job {j + 1} completes at {actual[j]} > 2 * {cstar[j]}")
    if float(rep.objective) > 2 * sol.value * (1 + ROUNDING_SLACK) + ROUNDING_SLACK:
        raise LPError(f"rounded value {rep.objective} exceeds twice the LP bound {sol.value}")
    return rep


def hurwicz_subinstance(inst: Instance, alpha: Fraction, k: int) -> Instance:
    """Scenario set whose largest cost equals ``alpha f_i + (1-alpha) f_k``
    maximised over ``i`` (processing times must be deterministic)."""
    weight = tuple(tuple(alpha * row[i] + (1 - alpha) * row[k] for i in range(inst.k))
                   for row in inst.weight)
    return Instance(inst.n, inst.k, inst.proc, inst.due, weight, inst.precedence, inst.objective)


def solve_hurwicz_wct(inst: Instance, alpha) -> SolveReport:
    """2-approximation for the Hurwicz criterion via K minmax relaxations."""
    _require_wct(inst)
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    v = preset("hurwicz", inst.k, alpha=alpha)
    if not inst.deterministic_proc():
        if not inst.deterministic_weight():
            raise UnsupportedError("Hurwicz rounding needs deterministic processing times or weights")
        rep = solve_hurwicz_wct(invert_instance(inst), alpha)
        return _report(inst, invert_schedule(rep.schedule), v, "wct-hurwicz",
                       lower_bound=rep.lower_bound, guarantee=Fraction(2),
                       stats=rep.stats, extra={**rep.extra, "inverted": True})
    vmax = preset("maximum", inst.k)
    best, bound, pivots = None, None, 0
    for k in range(inst.k):
        sub = approx_lp_rounding(hurwicz_subinstance(inst, alpha, k), vmax)
        pivots += sub.stats.get("lp_pivots", 0)
        bound = sub.lower_bound if bound is None else min(bound, sub.lower_bound)
        key = (owa_value(v, cost_vector(inst, sub.schedule)), k)
        if best is None or key < best[0]:
            best = (key, sub.schedule)
    return _report(inst, best[1], v, "wct-hurwicz", lower_bound=bound, guarantee=Fraction(2),
                   stats={"lp_pivots": pivots, "subproblems": inst.k},
                   extra={"scenario": best[0][1], "inverted": False})
