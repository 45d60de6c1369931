import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from owasched import (
    FormatError, InfeasibleScheduleError, InvalidInstanceError, Objective, ObjectiveMismatchError,
    SchemaError, Schedule, check_schedule, completion_times, cost, cost_vector, invert_instance,
    invert_schedule, make_instance, parse_instance, parse_schedule, serialize_instance,
    serialize_schedule, validate_instance,
)
from owasched.model import Instance, is_feasible, scale_to_integers
from owasched.testkit import enumerate_schedules, gen_random

WCT = Objective.WEIGHTED_COMPLETION_SUM
TARDY = Objective.MAX_WEIGHTED_TARDINESS


def test_well_formed_instance_has_no_violations():
    inst = make_instance([[1, 2], [3, 4]], [[0, 1], [2, 3]], [[1, 1], [1, 1]])
    assert validate_instance(inst) == []


def test_two_cycle_is_reported_with_witness():
    inst = make_instance([[1], [1]], precedence=[(0, 1), (1, 0)], validate=False)
    assert "cycle: 1→2→1" in validate_instance(inst)


def test_dimension_mismatch_reported():
    inst = Instance(2, 1, ((F(1),), (F(1),), (F(1),)), ((F(0),),) * 2, ((F(1),),) * 2, frozenset(), TARDY)
    assert any(v.startswith("dimension mismatch") for v in validate_instance(inst))


def test_negative_entries_reported():
    inst = make_instance([[1], [-1]], weight=[[-2], [1]], validate=False)
    problems = validate_instance(inst)
    assert any("proc" in p for p in problems) and any("weight" in p for p in problems)


def test_make_instance_rejects_invalid():
    with pytest.raises(InvalidInstanceError):
        make_instance([[1], [1]], precedence=[(0, 1), (1, 0)])


def test_completion_times_prefix_sums():
    inst = make_instance([[1], [2]])
    assert completion_times(inst, Schedule([0, 1]), 0) == [1, 3]
    inst = make_instance([[2], [3], [1]])
    c = completion_times(inst, Schedule([2, 0, 1]), 0)
    assert (c[2], c[0], c[1]) == (1, 3, 6)


def test_completion_times_all_zero():
    inst = make_instance([[0], [0], [0]])
    assert completion_times(inst, Schedule([1, 2, 0]), 0) == [0, 0, 0]


def test_scenario_out_of_range():
    inst = make_instance([[1], [2]])
    with pytest.raises(IndexError):
        cost(inst, Schedule([0, 1]), 1)


def test_tardiness_cost_examples():
    on_time = make_instance([[1], [1]], [[1], [2]])
    assert cost(on_time, Schedule([0, 1]), 0) == 0
    late = make_instance([[1], [1]], [[1], [1]])
    assert cost(late, Schedule([0, 1]), 0) == 1


def test_wct_cost_example(wct_small):
    assert cost(wct_small, Schedule([0, 1]), 0) == 15
    assert cost(wct_small, Schedule([1, 0]), 0) == 4 * 2 + 3 * 3


def test_cost_vector_single_scenario(wct_small):
    assert cost_vector(wct_small, Schedule([1, 0])) == (cost(wct_small, Schedule([1, 0]), 0),)


def test_cost_vector_tight_family(tight2):
    assert cost_vector(tight2, Schedule([0, 1, 2, 3])) == (0, 1)
    assert cost_vector(tight2, Schedule([1, 0, 3, 2])) == (1, 1)


def test_schedule_must_be_permutation():
    with pytest.raises(InfeasibleScheduleError):
        Schedule([0, 0, 1])
    inst = make_instance([[1], [1], [1]])
    with pytest.raises(InfeasibleScheduleError):
        check_schedule(inst, Schedule([0, 1]))


def test_precedence_violation_names_pair():
    inst = make_instance([[1], [1], [1]], precedence=[(0, 1), (1, 2)])
    with pytest.raises(InfeasibleScheduleError, match="2.*3|job 2"):
        check_schedule(inst, Schedule([0, 2, 1]))
    assert not is_feasible(inst, Schedule([0, 2, 1]))
    with pytest.raises(InfeasibleScheduleError):
        cost(inst, Schedule([0, 2, 1]), 0)


def test_invert_instance_swaps_and_reverses(wct_small):
    inv = invert_instance(wct_small)
    assert inv.proc == ((3,), (4,)) and inv.weight == ((1,), (2,))
    chain = make_instance([[1], [2]], None, [[3], [4]], [(0, 1)], WCT)
    assert invert_instance(chain).precedence == {(1, 0)}
    assert invert_instance(invert_instance(chain)) == chain


def test_invert_rejects_tardiness(tight2):
    with pytest.raises(ObjectiveMismatchError):
        invert_instance(tight2)


def test_invert_schedule():
    assert invert_schedule(Schedule([0, 1, 2])).order == (2, 1, 0)
    assert invert_schedule(Schedule([0])).order == (0,)
    s = Schedule([3, 1, 0, 2])
    assert invert_schedule(invert_schedule(s)) == s


def test_round_trip_json(tight2):
    assert parse_instance(serialize_instance(tight2)) == tight2
    s = Schedule([1, 0, 3, 2])
    assert parse_schedule(serialize_schedule(s)) == s
    assert json.loads(serialize_schedule(s)) == {"order": [2, 1, 4, 3]}


def test_parse_errors_are_distinguishable(tight2):
    doc = json.loads(serialize_instance(tight2))
    with pytest.raises(FormatError) as e:
        parse_instance("{not json")
    assert not isinstance(e.value, SchemaError)
    missing = dict(doc)
    del missing["due"]
    with pytest.raises(SchemaError, match="due"):
        parse_instance(json.dumps(missing))
    negative = dict(doc, weight=[[1, 1], [1, -1], [1, 1], [1, 1]])
    with pytest.raises(InvalidInstanceError, match="negative"):
        parse_instance(json.dumps(negative))


def test_decimal_strings_parse_exactly():
    text = ('{"n": 1, "k": 1, "objective": "sum_wc", "proc": [["0.1"]], "due": [[0]], '
            '"weight": [[0.3]], "prec": []}')
    inst = parse_instance(text)
    assert inst.proc[0][0] == F(1, 10) and inst.weight[0][0] == F(3, 10)


def test_scale_to_integers():
    inst = make_instance([[F(1, 2)], [F(1, 3)]], [[F(1, 4)], [0]])
    scaled, factor = scale_to_integers(inst)
    assert factor == 12 and scaled.is_integral()
    assert scaled.proc == ((6,), (4,))


def test_wct_due_dates_only_warn(caplog):
    inst = make_instance([[1]], [[5]], [[1]], (), WCT)
    assert validate_instance(inst) == []


# ---------------------------------------------------------------- properties

instances = st.builds(
    lambda seed, n, k, obj, d: gen_random(seed, n, k, objective=obj, integral=seed % 2 == 0,
                                          precedence_density=d),
    st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 3), st.sampled_from(list(Objective)),
    st.sampled_from([0.0, 0.3]),
)


@given(instances, st.data())
def test_inversion_preserves_cost(inst, data):
    if inst.objective is not WCT:
        inst = Instance(inst.n, inst.k, inst.proc, inst.due, inst.weight, inst.precedence, WCT)
    scheds = list(enumerate_schedules(inst))
    s = data.draw(st.sampled_from(scheds))
    inv = invert_instance(inst)
    assert cost_vector(inst, s) == cost_vector(inv, invert_schedule(s))


@given(instances, st.data())
def test_completion_times_equivariant_under_relabeling(inst, data):
    perm = data.draw(st.permutations(range(inst.n)))
    relabeled = make_instance(
        [inst.proc[perm.index(j)] for j in range(inst.n)],
        [inst.due[perm.index(j)] for j in range(inst.n)],
        [inst.weight[perm.index(j)] for j in range(inst.n)],
        [(perm[a], perm[b]) for a, b in inst.precedence], inst.objective)
    s = next(enumerate_schedules(inst))
    s2 = Schedule(perm[j] for j in s.order)
    for i in range(inst.k):
        c, c2 = completion_times(inst, s, i), completion_times(relabeled, s2, i)
        assert all(c[j] == c2[perm[j]] for j in range(inst.n))


@given(instances, st.data())
def test_cost_monotone_in_processing_time(inst, data):
    j = data.draw(st.integers(0, inst.n - 1))
    i = data.draw(st.integers(0, inst.k - 1))
    bump = data.draw(st.integers(1, 5))
    proc = [list(r) for r in inst.proc]
    proc[j][i] += bump
    bigger = make_instance(proc, inst.due, inst.weight, inst.precedence, inst.objective)
    s = next(enumerate_schedules(inst))
    assert cost(bigger, s, i) >= cost(inst, s, i)
