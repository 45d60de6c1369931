"""Instances, schedules, cost evaluation, transforms and JSON I/O.

Jobs are 0-based in the Python API; JSON files, the CLI and human-readable
messages use 1-based job numbers.  Every parameter is held as a
:class:`fractions.Fraction` so solver comparisons are exact.
"""
from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import (
    FormatError,
    InfeasibleScheduleError,
    InvalidInstanceError,
    ObjectiveMismatchError,
    SchemaError,
)

log = logging.getLogger(__name__)

Matrix = tuple[tuple[Fraction, ...], ...]


class Objective(str, enum.Enum):
    MAX_WEIGHTED_TARDINESS = "max_wt"
    WEIGHTED_COMPLETION_SUM = "sum_wc"


def to_fraction(x: Any) -> Fraction:
    """Exact conversion of ints, Fractions, decimal/ratio strings and floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        # decimal literal the user most likely meant, not the binary expansion
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a number")


def _matrix(rows: Iterable[Iterable[Any]]) -> Matrix:
    return tuple(tuple(to_fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class Instance:
    """Single-machine instance with a discrete scenario set.

    ``proc[j][i]``, ``due[j][i]`` and ``weight[j][i]`` are the processing
    time, due date and weight of job ``j`` under scenario ``i``.
    ``precedence`` holds 0-based pairs ``(a, b)`` meaning a before b.
    """

    n: int
    k: int
    proc: Matrix
    due: Matrix
    weight: Matrix
    precedence: frozenset[tuple[int, int]] = frozenset()
    objective: Objective = Objective.MAX_WEIGHTED_TARDINESS

    def successors(self) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in sorted(self.precedence):
            succ[a].append(b)
        return succ

    def predecessors(self) -> list[list[int]]:
        pred: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in sorted(self.precedence):
            pred[b].append(a)
        return pred

    def scenario_column(self, matrix: Matrix, i: int) -> tuple[Fraction, ...]:
        return tuple(row[i] for row in matrix)

    def is_integral(self) -> bool:
        return all(
            x.denominator == 1
            for m in (self.proc, self.due, self.weight)
            for row in m
            for x in row
        )

    def deterministic_proc(self) -> bool:
        return all(len(set(row)) <= 1 for row in self.proc)

    def deterministic_weight(self) -> bool:
        return all(len(set(row)) <= 1 for row in self.weight)


def make_instance(
    proc: Sequence[Sequence[Any]],
    due: Sequence[Sequence[Any]] | None = None,
    weight: Sequence[Sequence[Any]] | None = None,
    precedence: Iterable[tuple[int, int]] = (),
    objective: Objective | str = Objective.MAX_WEIGHTED_TARDINESS,
    validate: bool = True,
) -> Instance:
    """Build an instance from nested sequences (rows = jobs, columns = scenarios).

    Missing due dates default to 0 and missing weights to 1.
    """
    p = _matrix(proc)
    n = len(p)
    k = len(p[0]) if n else 0
    d = _matrix(due) if due is not None else tuple((Fraction(0),) * k for _ in range(n))
    w = _matrix(weight) if weight is not None else tuple((Fraction(1),) * k for _ in range(n))
    inst = Instance(
        n=n,
        k=k,
        proc=p,
        due=d,
        weight=w,
        precedence=frozenset((int(a), int(b)) for a, b in precedence),
        objective=Objective(objective),
    )
    if validate:
        problems = validate_instance(inst)
        if problems:
            raise InvalidInstanceError(problems)
    return inst


def find_cycle(n: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    """Return a cycle ``[a, b, ..., a]`` (0-based) if the edge set has one."""
    succ: dict[int, list[int]] = {}
    for a, b in sorted(edges):
        succ.setdefault(a, []).append(b)
    WHITE, GREY, BLACK = 0, 1, 2
    nodes = set(range(n)) | set(succ) | {b for bs in succ.values() for b in bs}
    color = {v: WHITE for v in nodes}
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        path = [root]
        color[root] = GREY
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = BLACK
                stack.pop()
                path.pop()
            elif color[nxt] == GREY:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(succ.get(nxt, ()))))
                path.append(nxt)
    return None


def validate_instance(inst: Instance) -> list[str]:
    """List every invariant violation; an empty list means the instance is ok."""
    problems: list[str] = []
    if inst.n < 1:
        problems.append("job count must be positive")
    if inst.k < 1:
        problems.append("scenario count must be positive")
    for name in ("proc", "due", "weight"):
        m = getattr(inst, name)
        if len(m) != inst.n or any(len(row) != inst.k for row in m):
            problems.append(f"dimension mismatch: {name} must be {inst.n}x{inst.k}")
            continue
        for j, row in enumerate(m):
            for i, x in enumerate(row):
                if x < 0:
                    problems.append(f"negative {name} for job {j + 1} under scenario {i + 1}: {x}")
    for a, b in sorted(inst.precedence):
        if not (0 <= a < inst.n and 0 <= b < inst.n):
            problems.append(f"precedence pair {a + 1}->{b + 1} references an unknown job")
        elif a == b:
            problems.append(f"cycle: {a + 1}→{a + 1}")
    if not problems:
        cycle = find_cycle(inst.n, inst.precedence)
        if cycle is not None:
            problems.append("cycle: " + "→".join(str(v + 1) for v in cycle))
    if (
        not problems
        and inst.objective is Objective.WEIGHTED_COMPLETION_SUM
        and any(x != 0 for row in inst.due for x in row)
    ):
        log.warning("due dates are ignored for the weighted completion time objective")
    return problems


@dataclass(frozen=True)
class Schedule:
    """A processing sequence of 0-based job indices."""

    order: tuple[int, ...]

    def __init__(self, order: Iterable[int]):
        order = tuple(int(j) for j in order)
        if sorted(order) != list(range(len(order))):
            raise InfeasibleScheduleError(f"order {[j + 1 for j in order]} is not a permutation")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def positions(self) -> list[int]:
        pos = [0] * len(self.order)
        for r, j in enumerate(self.order):
            pos[j] = r
        return pos

    def one_based(self) -> list[int]:
        return [j + 1 for j in self.order]


def check_schedule(inst: Instance, sched: Schedule) -> None:
    """Raise :class:`InfeasibleScheduleError` unless ``sched`` is feasible."""
    if sorted(sched.order) != list(range(inst.n)):
        raise InfeasibleScheduleError(
            f"order {sched.one_based()} is not a permutation of jobs 1..{inst.n}"
        )
    pos = sched.positions()
    for a, b in sorted(inst.precedence):
        if pos[a] > pos[b]:
            raise InfeasibleScheduleError(
                f"precedence {a + 1}->{b + 1} violated: job {b + 1} runs before job {a + 1}"
            )


def is_feasible(inst: Instance, sched: Schedule) -> bool:
    try:
        check_schedule(inst, sched)
    except InfeasibleScheduleError:
        return False
    return True


def _check_scenario(inst: Instance, scenario: int) -> None:
    if not 0 <= scenario < inst.k:
        raise IndexError(f"scenario index {scenario} out of range for K={inst.k}")


def completion_times(inst: Instance, sched: Schedule, scenario: int) -> list[Fraction]:
    """Completion time of every job (indexed by job) under one scenario."""
    _check_scenario(inst, scenario)
    check_schedule(inst, sched)
    out = [Fraction(0)] * inst.n
    t = Fraction(0)
    for j in sched.order:
        t += inst.proc[j][scenario]
        out[j] = t
    return out


def cost(inst: Instance, sched: Schedule, scenario: int) -> Fraction:
    c = completion_times(inst, sched, scenario)
    i = scenario
    if inst.objective is Objective.MAX_WEIGHTED_TARDINESS:
        return max(
            (inst.weight[j][i] * max(c[j] - inst.due[j][i], 0) for j in range(inst.n)),
            default=Fraction(0),
        )
    return sum((inst.weight[j][i] * c[j] for j in range(inst.n)), Fraction(0))


def cost_vector(inst: Instance, sched: Schedule) -> tuple[Fraction, ...]:
    return tuple(cost(inst, sched, i) for i in range(inst.k))


def invert_instance(inst: Instance) -> Instance:
    """Swap processing times and weights and reverse every precedence pair.

    Cost of ``pi`` under the original equals the cost of the reversed
    schedule under the result, scenario by scenario.
    """
    if inst.objective is not Objective.WEIGHTED_COMPLETION_SUM:
        raise ObjectiveMismatchError("inversion is defined for the weighted completion time objective only")
    return Instance(
        n=inst.n,
        k=inst.k,
        proc=inst.weight,
        due=inst.due,
        weight=inst.proc,
        precedence=frozenset((b, a) for a, b in inst.precedence),
        objective=inst.objective,
    )


def invert_schedule(sched: Schedule) -> Schedule:
    return Schedule(reversed(sched.order))


def scale_to_integers(inst: Instance) -> tuple[Instance, int]:
    """Multiply every parameter by the LCM of all denominators."""
    factor = 1
    for m in (inst.proc, inst.due, inst.weight):
        for row in m:
            for x in row:
                factor = math.lcm(factor, x.denominator)
    if factor == 1:
        return inst, 1

    def scale(m: Matrix) -> Matrix:
        return tuple(tuple(x * factor for x in row) for row in m)

    return (
        Instance(inst.n, inst.k, scale(inst.proc), scale(inst.due), scale(inst.weight),
                 inst.precedence, inst.objective),
        factor,
    )


@dataclass
class SolveReport:
    """Result of a solver run.

    ``objective`` is always the true OWA value of ``schedule`` under the
    weights the solver was asked about.  ``lower_bound`` may be a float when
    it comes from an LP.
    """

    schedule: Schedule
    objective: Fraction
    lower_bound: Fraction | float | None = None
    guarantee: Fraction | None = None
    stats: dict[str, int] = field(default_factory=dict)
    method: str = ""
    costs: tuple[Fraction, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        def num(x):
            if x is None:
                return None
            if isinstance(x, Fraction):
                return format_number(x)
            return x

        d = {
            "method": self.method,
            "order": self.schedule.one_based(),
            "objective": format_number(self.objective),
            "objective_float": float(self.objective),
            "lower_bound": num(self.lower_bound),
            "guarantee": num(self.guarantee),
            "cost_vector": [format_number(c) for c in self.costs],
            "stats": dict(self.stats),
        }
        d.update(self.extra)
        return d


# --------------------------------------------------------------------- JSON I/O

def format_number(x: Fraction) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def _load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed JSON: {e}") from e


def _schema_matrix(doc: dict, key: str) -> Matrix:
    rows = doc[key]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f'"{key}" must be a list of lists')
    try:
        return _matrix(rows)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise SchemaError(f'"{key}" holds a non-numeric entry: {e}') from e


def parse_instance(text: str) -> Instance:
    """Parse the instance JSON format; raises FormatError, SchemaError or
    InvalidInstanceError depending on what is wrong."""
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be a JSON object")
    missing = [key for key in ("n", "k", "objective", "proc", "due", "weight") if key not in doc]
    if missing:
        raise SchemaError("missing key(s): " + ", ".join(f'"{m}"' for m in missing))
    if not isinstance(doc["n"], int) or not isinstance(doc["k"], int):
        raise SchemaError('"n" and "k" must be integers')
    try:
        objective = Objective(doc["objective"])
    except ValueError:
        raise SchemaError(f'unknown objective {doc["objective"]!r}; expected "max_wt" or "sum_wc"')
    prec = doc.get("prec", [])
    if not isinstance(prec, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e) for e in prec
    ):
        raise SchemaError('"prec" must be a list of [int, int] pairs')
    inst = Instance(
        n=doc["n"],
        k=doc["k"],
        proc=_schema_matrix(doc, "proc"),
        due=_schema_matrix(doc, "due"),
        weight=_schema_matrix(doc, "weight"),
        precedence=frozenset((a - 1, b - 1) for a, b in prec),
        objective=objective,
    )
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstanceError(problems)
    return inst


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    def rows(m: Matrix):
        return [[format_number(x) for x in row] for row in m]

    return {
        "n": inst.n,
        "k": inst.k,
        "objective": inst.objective.value,
        "proc": rows(inst.proc),
        "due": rows(inst.due),
        "weight": rows(inst.weight),
        "prec": [[a + 1, b + 1] for a, b in sorted(inst.precedence)],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst))


def parse_schedule(text: str) -> Schedule:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "order" not in doc:
        raise SchemaError('schedule document must be {"order": [int, ...]}')
    order = doc["order"]
    if not isinstance(order, list) or not all(isinstance(x, int) for x in order):
        raise SchemaError('"order" must be a list of integers')
    return Schedule(j - 1 for j in order)


def serialize_schedule(sched: Schedule) -> str:
    return json.dumps({"order": sched.one_based()})
