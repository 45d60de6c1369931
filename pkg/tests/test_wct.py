import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from owasched import (
    Objective, ObjectiveMismatchError, OwaWeights, Schedule, UnsupportedError, completion_times,
    cost, cost_vector, deviation_weights, invert_instance, invert_schedule, make_instance, owa_value,
    preset, theta_k,
)
from owasched import testkit as tk
from owasched import wct as W
from owasched.lp import lp_solve

WCT = Objective.WEIGHTED_COMPLETION_SUM
seeds = st.integers(0, 10**6)


def wct(proc, weight, prec=()):
    return make_instance(proc, None, weight, prec, WCT)


def rand_wct(seed, n_max=6, k_max=3, **kw):
    rng = random.Random(seed)
    kw.setdefault("precedence_density", rng.choice([0.0, 0.2]))
    kw.setdefault("max_value", 10)
    return tk.gen_random(seed, rng.randint(1, n_max), rng.randint(1, k_max), objective=WCT,
                         positive=True, **kw)


def test_wspt_examples():
    s = W.solve_deterministic_wspt([1, 2], [2, 1])
    assert s.order == (0, 1)
    inst = wct([[1], [2]], [[2], [1]])
    assert cost(inst, s, 0) == 5 and cost(inst, Schedule([1, 0]), 0) == 8
    assert W.solve_deterministic_wspt([3, 1, 2], [7, 7, 7]).order == (1, 2, 0)
    assert W.solve_deterministic_wspt([5, 1], [0, 1]).order == (1, 0)


def test_wspt_rejects_precedence():
    with pytest.raises(UnsupportedError):
        W.solve_deterministic_wspt([1, 2], [1, 1], [(0, 1)])


@given(seeds)
def test_wspt_is_optimal(seed):
    inst = rand_wct(seed, n_max=7, k_max=1, precedence_density=0.0)
    s = W.solve_deterministic_wspt(inst.scenario_column(inst.proc, 0), inst.scenario_column(inst.weight, 0))
    assert cost(inst, s, 0) == tk.oracle_opt(inst, OwaWeights([1])).objective


@given(seeds)
def test_min_min_matches_oracle(seed):
    inst = rand_wct(seed, n_max=7)
    assert W.solve_min_min_wct(inst).objective == tk.oracle_opt(inst, preset("minimum", inst.k)).objective


def test_min_min_identical_scenarios():
    inst = wct([[3, 3], [1, 1], [2, 2]], [[1, 1], [1, 1], [5, 5]])
    assert W.solve_min_min_wct(inst).schedule == W.solve_deterministic_wspt([3, 1, 2], [1, 1, 5])


def test_wrong_objective(tight2):
    with pytest.raises(ObjectiveMismatchError):
        W.approx_lp_rounding(tight2, preset("maximum", 2))


def test_aggregated_instance():
    inst = wct([[1, 3], [2, 2]], [[4, 0], [1, 5]])
    agg = W.aggregate_instance(inst, OwaWeights([F(3, 4), F(1, 4)]))
    assert agg.proc_hat == (4, 4) and agg.weight_hat == (3, F(4))


def test_aggregate_single_scenario_is_exact():
    inst = wct([[2], [1], [3]], [[1], [1], [1]])
    rep = W.approx_aggregate(inst, OwaWeights([1]))
    assert rep.guarantee == 1 * min(F(1), F(3))
    assert rep.objective == tk.oracle_opt(inst, OwaWeights([1])).objective


def test_aggregate_uniform_instance():
    inst = wct([[1] * 3] * 4, [[1] * 3] * 4)
    rep = W.approx_aggregate(inst, preset("average", 3))
    assert rep.guarantee == 3
    assert rep.objective == tk.oracle_opt(inst, preset("average", 3)).objective


def test_aggregate_zero_weight_uses_other_ratio():
    inst = wct([[1, 2], [2, 2]], [[0, 1], [1, 1]])
    assert W.aggregate_guarantee(inst) == 2 * 2
    inst = wct([[0, 2], [2, 2]], [[0, 1], [1, 1]])
    assert W.aggregate_guarantee(inst) is None


def test_aggregate_needs_monotone_weights():
    with pytest.raises(ValueError):
        W.approx_aggregate(wct([[1, 1]], [[1, 1]]), OwaWeights([0, 1]))


@given(seeds)
def test_aggregate_within_guarantee(seed):
    inst = rand_wct(seed, precedence_density=0.0)
    v = tk.random_weights(random.Random(seed), inst.k, nonincreasing=True)
    rep = W.approx_aggregate(inst, v)
    assert rep.objective <= rep.guarantee * tk.oracle_opt(inst, v).objective


# --------------------------------------------------------------- LP model

def test_lp_single_job():
    inst = wct([[3, 3, 3]], [[1, 4, 2]])
    v = OwaWeights([F(1, 2), F(1, 3), F(1, 6)])
    sol = lp_solve(W.build_owa_lp(inst, v).lp)
    assert sol.value == pytest.approx(float(owa_value(v, [3, 12, 6])))


@given(st.lists(st.integers(1, 9), min_size=4, max_size=4))
def test_lp_two_jobs_is_tight(vals):
    p1, p2, w1, w2 = vals
    inst = wct([[p1], [p2]], [[w1], [w2]])
    sol = lp_solve(W.build_owa_lp(inst, OwaWeights([1])).lp)
    assert sol.value == pytest.approx(min(p1 * w1 + (p1 + p2) * w2, p2 * w2 + (p1 + p2) * w1))


@given(seeds, st.data())
def test_fixed_order_gives_deviation_sum(seed, data):
    inst = rand_wct(seed, n_max=5, deterministic_p=True)
    v = tk.random_weights(random.Random(seed), inst.k, nonincreasing=True)
    model = W.build_owa_lp(inst, v)
    s = data.draw(st.sampled_from(list(tk.enumerate_schedules(inst))))
    f = cost_vector(inst, s)
    want = sum(d * theta_k(f, k + 1) for k, d in enumerate(deviation_weights(v).values))
    sol = lp_solve(model.fix_order(s))
    assert sol.value == pytest.approx(float(want), rel=1e-9, abs=1e-9)


def test_lp_row_counts():
    inst = rand_wct(7, n_max=5, deterministic_p=True, precedence_density=0.0)
    n, K = inst.n, inst.k
    lp = W.build_owa_lp(inst, preset("average", K)).lp
    assert lp.num_vars == n * (n - 1) + K * K + K
    assert lp.num_rows == n * (n - 1) // 2 + 2 * (n * (n - 1) * (n - 2) // 6) + 2 * K * K


def test_lp_preconditions():
    with pytest.raises(UnsupportedError):
        W.build_owa_lp(wct([[1, 2], [1, 1]], [[1, 2], [1, 1]]), preset("average", 2))
    with pytest.raises(ValueError):
        W.build_owa_lp(wct([[1, 1]], [[1, 2]]), OwaWeights([0, 1]))


def test_rounding_single_job():
    inst = wct([[2, 2]], [[1, 3]])
    rep = W.approx_lp_rounding(inst, preset("average", 2))
    assert rep.schedule.order == (0,) and rep.objective == pytest.approx(rep.lower_bound)


@given(seeds)
def test_rounding_single_scenario_vs_wspt(seed):
    inst = rand_wct(seed, n_max=8, k_max=1, precedence_density=0.0)
    rep = W.approx_lp_rounding(inst, OwaWeights([1]))
    s = W.solve_deterministic_wspt(inst.scenario_column(inst.proc, 0), inst.scenario_column(inst.weight, 0))
    assert rep.objective <= 2 * cost(inst, s, 0)


def parallel_inequality_holds(p, cstar, subset):
    lhs = sum(p[j] * cstar[j] for j in subset)
    tot = sum(p[j] for j in subset)
    return lhs >= 0.5 * (tot ** 2 + sum(p[j] ** 2 for j in subset)) - 1e-6


@given(seeds, st.data())
def test_rounding_bounds_and_valid_inequalities(seed, data):
    inst = rand_wct(seed, n_max=7, deterministic_p=True)
    v = tk.random_weights(random.Random(seed), inst.k, nonincreasing=True)
    rep = W.approx_lp_rounding(inst, v)
    opt = tk.oracle_opt(inst, v).objective
    z = rep.lower_bound
    assert z <= float(opt) + 1e-6
    assert float(rep.objective) <= 2 * z + 1e-6
    cstar = rep.extra["lp_completion_times"]
    actual = completion_times(inst, rep.schedule, 0)
    assert all(float(actual[j]) <= 2 * cstar[j] + 1e-6 for j in range(inst.n))
    p = [float(r[0]) for r in inst.proc]
    order = rep.schedule.order
    for r in range(1, inst.n + 1):
        assert parallel_inequality_holds(p, cstar, order[:r])
    for _ in range(5):
        subset = data.draw(st.sets(st.integers(0, inst.n - 1), min_size=1))
        assert parallel_inequality_holds(p, cstar, subset)


@given(seeds)
def test_rounding_through_inversion(seed):
    inst = rand_wct(seed, n_max=6, deterministic_w=True)
    if inst.deterministic_proc():
        return
    v = tk.random_weights(random.Random(seed), inst.k, nonincreasing=True)
    rep = W.approx_lp_rounding(inst, v)
    assert rep.extra["inverted"]
    assert float(rep.objective) <= 2 * rep.lower_bound + 1e-6
    assert rep.lower_bound <= float(tk.oracle_opt(inst, v).objective) + 1e-6


@given(seeds)
def test_inverted_path_same_value(seed):
    inst = rand_wct(seed, n_max=6, deterministic_p=True)
    v = tk.random_weights(random.Random(seed), inst.k, nonincreasing=True)
    inv = invert_instance(inst)
    direct = W.approx_lp_rounding(inst, v).schedule
    assert owa_value(v, cost_vector(inv, invert_schedule(direct))) == owa_value(v, cost_vector(inst, direct))


def test_rounding_respects_zero_length_precedence():
    inst = wct([[0], [0], [1]], [[1], [5], [1]], [(0, 1)])
    rep = W.approx_lp_rounding(inst, OwaWeights([1]))
    pos = rep.schedule.positions()
    assert pos[0] < pos[1]


def test_hurwicz_alpha_one_is_minmax_rounding():
    inst = rand_wct(17, deterministic_p=True)
    a = W.solve_hurwicz_wct(inst, 1)
    b = W.approx_lp_rounding(inst, preset("maximum", inst.k))
    assert a.objective == b.objective


@given(seeds, st.sampled_from([F(0), F(1, 3), F(1, 2), F(1)]))
def test_hurwicz_single_scenario(seed, alpha):
    inst = rand_wct(seed, k_max=1, precedence_density=0.0)
    rep = W.solve_hurwicz_wct(inst, alpha)
    s = W.solve_deterministic_wspt(inst.scenario_column(inst.proc, 0), inst.scenario_column(inst.weight, 0))
    assert rep.objective <= 2 * cost(inst, s, 0)


@given(seeds, st.booleans())
def test_hurwicz_within_two(seed, invert):
    inst = rand_wct(seed, n_max=7, deterministic_p=not invert, deterministic_w=invert)
    alpha = F(1, 2)
    rep = W.solve_hurwicz_wct(inst, alpha)
    opt = tk.oracle_opt(inst, preset("hurwicz", inst.k, alpha=alpha)).objective
    assert rep.objective <= 2 * opt
    assert rep.lower_bound <= float(opt) + 1e-6
