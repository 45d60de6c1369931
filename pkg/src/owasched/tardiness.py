"""Solvers for the maximum weighted tardiness objective under OWA.

All solvers build schedules back to front: keep the set ``D`` of unscheduled
jobs together with the per-scenario sums ``p(S_i)`` of their processing
times, and repeatedly fix, in the last free position, a job without a
successor in ``D``.  Which job is picked (and which ones are allowed) is
what distinguishes the variants.  Ties are broken by the lowest job index.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import BudgetExceededError, ObjectiveMismatchError, UnsupportedError
from .model import Instance, Objective, Schedule, SolveReport, cost_vector
from .owa import OwaWeights, owa_value, preset

DEFAULT_QUANTILE_BUDGET = 10**6
DEFAULT_THRESHOLD_BUDGET = 10**7

Thresholds = Sequence[Fraction | None]


def _require_tardiness(inst: Instance) -> None:
    if inst.objective is not Objective.MAX_WEIGHTED_TARDINESS:
        raise ObjectiveMismatchError("this solver needs a maximum weighted tardiness instance")


def _penalty(inst: Instance, j: int, total: Fraction, i: int) -> Fraction:
    """Weighted tardiness of ``j`` under ``S_i`` if it completes at ``total``."""
    x = inst.weight[j][i] * (total - inst.due[j][i])
    return x if x > 0 else Fraction(0)


def job_bound(inst: Instance, j: int, jobs: Sequence[int], scenarios: Sequence[int] | None = None) -> Fraction:
    """Worst weighted tardiness of ``j`` when it finishes right after ``jobs``
    (a set that should include ``j``), over the given scenarios."""
    if scenarios is None:
        scenarios = range(inst.k)
    best = Fraction(0)
    for i in scenarios:
        best = max(best, _penalty(inst, j, sum((inst.proc[q][i] for q in jobs), Fraction(0)), i))
    return best


def f_bound(inst: Instance) -> Fraction:
    """Upper bound on any job's weighted tardiness in any scenario."""
    _require_tardiness(inst)
    everyone = range(inst.n)
    return max((job_bound(inst, j, everyone) for j in everyone), default=Fraction(0))


def _backward(
    inst: Instance,
    scenarios: Sequence[int],
    thresholds: Thresholds | None = None,
    on_step: Callable[[list[int], list[Fraction], int, dict[int, Fraction]], None] | None = None,
) -> list[int] | None:
    """Greedy minimising ``max_{i in scenarios} f(pi, S_i)``.

    ``thresholds[i]`` (``None`` = no limit) restricts the choice at each step
    to jobs whose weighted tardiness under ``S_i`` stays within it, which is
    the same as minimising over ``{pi : f(pi, S_i) <= thresholds[i]}``.
    Returns ``None`` when that set is empty.
    """
    n, k = inst.n, inst.k
    in_d = [True] * n
    open_succ = [0] * n
    preds = inst.predecessors()
    for a, _ in inst.precedence:
        open_succ[a] += 1
    totals = [sum((inst.proc[j][i] for j in range(n)), Fraction(0)) for i in range(k)]
    limited = [] if thresholds is None else [i for i, t in enumerate(thresholds) if t is not None]
    order = [0] * n
    for r in range(n - 1, -1, -1):
        best_j, best_val = -1, None
        values: dict[int, Fraction] = {}
        for j in range(n):
            if not in_d[j] or open_succ[j]:
                continue
            val = Fraction(0)
            for i in scenarios:
                x = _penalty(inst, j, totals[i], i)
                if x > val:
                    val = x
            values[j] = val
            if any(_penalty(inst, j, totals[i], i) > thresholds[i] for i in limited):
                continue
            if best_val is None or val < best_val:
                best_j, best_val = j, val
        if best_j < 0:
            return None
        if on_step is not None:
            on_step([q for q in range(n) if in_d[q]], list(totals), best_j, values)
        order[r] = best_j
        in_d[best_j] = False
        for i in range(k):
            totals[i] -= inst.proc[best_j][i]
        for a in preds[best_j]:
            open_succ[a] -= 1
    return order


def _report(inst: Instance, order: Sequence[int], v: OwaWeights, method: str, **kw) -> SolveReport:
    sched = Schedule(order)
    costs = cost_vector(inst, sched)
    return SolveReport(sched, owa_value(v, costs), method=method, costs=costs, **kw)


def solve_minmax(inst: Instance) -> SolveReport:
    """Schedule minimising the largest scenario cost, in O(K n^2)."""
    _require_tardiness(inst)
    order = _backward(inst, range(inst.k))
    return _report(inst, order, preset("maximum", inst.k), "minmax", stats={"steps": inst.n})


def solve_deterministic(inst: Instance, scenario: int) -> Schedule:
    """Lawler's rule for the single scenario ``scenario``."""
    _require_tardiness(inst)
    return Schedule(_backward(inst, [scenario]))


def solve_constrained_minmax(inst: Instance, k: int, t) -> SolveReport | None:
    """Min of the largest scenario cost over schedules with ``f(pi, S_k) <= t``.

    Returns ``None`` when no feasible schedule meets the threshold.
    """
    _require_tardiness(inst)
    if not 0 <= k < inst.k:
        raise IndexError(f"scenario index {k} out of range for K={inst.k}")
    t = Fraction(t)
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    thresholds: list[Fraction | None] = [None] * inst.k
    thresholds[k] = t
    order = _backward(inst, range(inst.k), thresholds)
    if order is None:
        return None
    return _report(inst, order, preset("maximum", inst.k), "constrained-minmax",
                   extra={"scenario": k, "threshold": str(t)})


def solve_min_min(inst: Instance) -> SolveReport:
    """Best of the K per-scenario optimal schedules."""
    _require_tardiness(inst)
    best = None
    for i in range(inst.k):
        sched = solve_deterministic(inst, i)
        own = cost_vector(inst, sched)[i]
        if best is None or own < best[0]:
            best = (own, sched)
    return _report(inst, best[1].order, preset("minimum", inst.k), "minmin", stats={"scenarios_solved": inst.k})


# ------------------------------------------------------------------ Hurwicz

@dataclass
class BreakpointTrace:
    """Left endpoints of the constancy intervals of ``t -> Psi_k(t)``.

    ``values[v]`` holds on ``[breakpoints[v], breakpoints[v+1])`` and the last
    value holds from the last breakpoint on.  Below ``breakpoints[0]`` no
    schedule meets the threshold.
    """

    scenario: int
    breakpoints: list[Fraction] = field(default_factory=list)
    values: list[Fraction] = field(default_factory=list)
    schedules: list[Schedule] = field(default_factory=list)
    runs: int = 0

    def value_at(self, t) -> Fraction | None:
        t = Fraction(t)
        if not self.breakpoints or t < self.breakpoints[0]:
            return None
        idx = 0
        for v, b in enumerate(self.breakpoints):
            if b <= t:
                idx = v
        return self.values[idx]


def _next_change(inst: Instance, k: int, t: Fraction) -> Fraction | None:
    """Smallest threshold above ``t`` at which the constrained greedy would
    pick a different job at some step of its current run."""
    found: list[Fraction] = []

    def on_step(d_jobs, totals, chosen, values):
        key = (values[chosen], chosen)
        for q, val in values.items():
            if q == chosen:
                continue
            tq = _penalty(inst, q, totals[k], k)
            if tq > t and (val, q) < key:
                found.append(tq)

    thresholds: list[Fraction | None] = [None] * inst.k
    thresholds[k] = t
    _backward(inst, range(inst.k), thresholds, on_step=on_step)
    return min(found) if found else None


def hurwicz_breakpoints(inst: Instance, k: int) -> BreakpointTrace:
    """Sweep the thresholds at which ``Psi_k`` can change, from the best
    single-scenario cost under ``S_k`` up to the global minmax value."""
    _require_tardiness(inst)
    if not 0 <= k < inst.k:
        raise IndexError(f"scenario index {k} out of range for K={inst.k}")
    trace = BreakpointTrace(scenario=k)
    top = solve_minmax(inst).objective
    t = cost_vector(inst, solve_deterministic(inst, k))[k]
    while True:
        rep = solve_constrained_minmax(inst, k, t)
        trace.runs += 1
        if not trace.values or rep.objective < trace.values[-1]:
            trace.breakpoints.append(t)
            trace.values.append(rep.objective)
            trace.schedules.append(rep.schedule)
        if rep.objective == top:
            break
        nxt = _next_change(inst, k, t)
        if nxt is None:
            break
        t = nxt
    return trace


def solve_hurwicz(inst: Instance, alpha) -> SolveReport:
    """Minimise ``alpha * max_i f + (1 - alpha) * min_i f``."""
    _require_tardiness(inst)
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    v = preset("hurwicz", inst.k, alpha=alpha)
    if alpha == 1:
        rep = solve_minmax(inst)
        return _report(inst, rep.schedule.order, v, "hurwicz", stats=rep.stats)
    if alpha == 0:
        rep = solve_min_min(inst)
        return _report(inst, rep.schedule.order, v, "hurwicz", stats=rep.stats)
    best = None
    visited = runs = 0
    for k in range(inst.k):
        trace = hurwicz_breakpoints(inst, k)
        runs += trace.runs
        for sched in trace.schedules:
            visited += 1
            val = owa_value(v, cost_vector(inst, sched))
            key = (val, sched.order)
            if best is None or key < best:
                best = key
    return _report(inst, best[1], v, "hurwicz", stats={"breakpoints": visited, "constrained_runs": runs})


# ------------------------------------------------------------------ quantile

def solve_quantile(inst: Instance, q: int, budget: int = DEFAULT_QUANTILE_BUDGET) -> SolveReport:
    """Minimise the ``q``-th largest scenario cost (``q`` is 1-based).

    Tries every way of discarding ``q - 1`` scenarios and solving the minmax
    problem on the rest.
    """
    _require_tardiness(inst)
    if not 1 <= q <= inst.k:
        raise ValueError(f"quantile index must be in 1..{inst.k}, got {q}")
    count = math.comb(inst.k, q - 1)
    if count > budget:
        raise BudgetExceededError(f"C({inst.k},{q - 1}) = {count} subsets exceed the budget {budget}")
    best = None
    for dropped in itertools.combinations(range(inst.k), q - 1):
        kept = [i for i in range(inst.k) if i not in dropped]
        order = _backward(inst, kept)
        costs = cost_vector(inst, Schedule(order))
        key = (max(costs[i] for i in kept), tuple(order))
        if best is None or key < best:
            best = key
    return _report(inst, best[1], preset("quantile", inst.k, q=q), "quantile",
                   stats={"subsets": count})


def approx_owa_quantile(inst: Instance, v: OwaWeights, budget: int = DEFAULT_QUANTILE_BUDGET) -> SolveReport:
    """Optimal schedule for the quantile at the first nonzero weight ``v_q``;
    its OWA value is within ``1 / v_q`` of the optimum."""
    _require_tardiness(inst)
    if len(v) != inst.k:
        raise ValueError("weight vector length differs from the scenario count")
    pos = v.first_positive()
    rep = solve_quantile(inst, pos + 1, budget)
    return _report(inst, rep.schedule.order, v, "owa-quantile-approx",
                   guarantee=1 / v[pos], stats=rep.stats, extra={"quantile": pos + 1})


# ------------------------------------------------------------ bounded OWA

def threshold_feasible(inst: Instance, t: Thresholds) -> Schedule | None:
    """Some schedule with ``f(pi, S_i) <= t[i]`` for all ``i``, or ``None``."""
    _require_tardiness(inst)
    order = _backward(inst, range(inst.k), list(t))
    return None if order is None else Schedule(order)


def _candidate_costs(inst: Instance, i: int) -> list[Fraction]:
    """Every value scenario ``i``'s cost can take: zero plus the weighted
    tardiness of some job finishing right after some set of jobs."""
    p = [inst.proc[j][i] for j in range(inst.n)]
    out = {Fraction(0)}
    for j in range(inst.n):
        sums = {p[j]}
        for q in range(inst.n):
            if q != j:
                sums |= {s + p[q] for s in sums}
        for s in sums:
            out.add(_penalty(inst, j, s, i))
    return sorted(out)


def solve_owa_bounded(
    inst: Instance,
    v: OwaWeights,
    budget: int = DEFAULT_THRESHOLD_BUDGET,
    strategy: str = "pruned",
) -> SolveReport:
    """Exact OWA minimisation by enumerating cost-threshold vectors.

    ``strategy="grid"`` scans every ``t`` in ``{0..f_max}^K`` and keeps a
    feasible one with the smallest ``owa(v, t)``; the budget caps
    ``(f_max + 1)^K``.  ``strategy="pruned"`` walks the same vectors
    scenario by scenario, restricted to attainable cost values, derives the
    last coordinate with one constrained greedy run, and cuts subtrees whose
    OWA lower bound cannot beat the incumbent; the budget caps greedy runs.
    """
    _require_tardiness(inst)
    if len(v) != inst.k:
        raise ValueError("weight vector length differs from the scenario count")
    if not inst.is_integral():
        raise UnsupportedError("bounded OWA enumeration needs integral parameters (scale them first)")
    if strategy == "grid":
        return _owa_grid(inst, v, budget)
    if strategy == "pruned":
        return _owa_pruned(inst, v, budget)
    raise ValueError(f"unknown strategy {strategy!r}")


def _owa_grid(inst: Instance, v: OwaWeights, budget: int) -> SolveReport:
    fmax = int(f_bound(inst))
    total = (fmax + 1) ** inst.k
    if total > budget:
        raise BudgetExceededError(f"(f_max+1)^K = {total} threshold vectors exceed the budget {budget}")
    best = None
    tested = 0
    for t in itertools.product(range(fmax + 1), repeat=inst.k):
        val = owa_value(v, t)
        if best is not None and val >= best[0]:
            continue
        tested += 1
        sched = threshold_feasible(inst, [Fraction(x) for x in t])
        if sched is not None:
            best = (val, sched)
    rep = _report(inst, best[1].order, v, "owa-exact",
                  stats={"threshold_vectors": total, "feasibility_tests": tested})
    rep.extra["threshold"] = [int(x) for x in rep.costs]
    return rep


def _owa_pruned(inst: Instance, v: OwaWeights, budget: int) -> SolveReport:
    K = inst.k
    cands = [_candidate_costs(inst, i) for i in range(K)]
    caps = [max(_penalty(inst, j, sum(inst.proc[q][i] for q in range(inst.n)), i) for j in range(inst.n))
            for i in range(K)]
    stats = {"greedy_runs": 0, "nodes": 0}
    best: list = [None]

    def offer(order):
        costs = cost_vector(inst, Schedule(order))
        key = (owa_value(v, costs), tuple(order))
        if best[0] is None or key < best[0]:
            best[0] = key

    def run(scenarios, thresholds):
        stats["greedy_runs"] += 1
        if stats["greedy_runs"] > budget:
            raise BudgetExceededError(f"more than {budget} constrained greedy runs")
        return _backward(inst, scenarios, thresholds)

    offer(_backward(inst, range(K)))
    for i in range(K):
        offer(_backward(inst, [i]))

    # Siblings are visited with ascending thresholds drawn from the attainable
    # costs, so a schedule not covered by an earlier sibling costs exactly the
    # prefix value in every fixed scenario.  That makes owa(prefix + minima of
    # the free scenarios) a valid bound for the whole subtree.
    def search(prefix: list[Fraction]) -> None:
        stats["nodes"] += 1
        r = len(prefix)
        thresholds = list(prefix) + [None] * (K - r)
        if r == K - 1:
            order = run([K - 1], thresholds)
            if order is not None:
                offer(order)
            return
        lows = []
        for i in range(r, K):
            order = run([i], thresholds)
            if order is None:
                return
            offer(order)
            lows.append(cost_vector(inst, Schedule(order))[i])
        if owa_value(v, list(prefix) + lows) >= best[0][0]:
            return
        for t in cands[r]:
            if t < lows[0]:
                continue
            if owa_value(v, list(prefix) + [t] + lows[1:]) >= best[0][0]:
                break
            search(list(prefix) + [t])
            if t >= caps[r]:
                break

    if K == 1:
        stats["nodes"] = 1
    else:
        search([])
    rep = _report(inst, best[0][1], v, "owa-exact", stats=stats)
    rep.extra["threshold"] = [int(x) for x in rep.costs]
    return rep
