"""Brute-force oracles and instance generators.

The oracle enumerates every feasible permutation with numpy over
integer-scaled parameters, so it shares no code path with the solvers.
The CNF generators build the gadget instances used in the hardness
reductions for both objectives.
"""
from __future__ import annotations

import functools
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError, FormatError
from .model import Instance, Objective, Schedule, SolveReport, cost_vector, make_instance
from .owa import OwaWeights, owa_value

DEFAULT_CAP = 9
_INT64_SAFE = 2**62


# ------------------------------------------------------------- enumeration

def enumerate_schedules(inst: Instance, cap: int = DEFAULT_CAP) -> Iterator[Schedule]:
    """Yield every precedence-feasible permutation once, in lexicographic order."""
    if inst.n > cap:
        raise BudgetExceededError(f"n = {inst.n} exceeds the enumeration cap {cap}")
    preds = inst.predecessors()
    placed = [False] * inst.n
    prefix: list[int] = []

    def rec():
        if len(prefix) == inst.n:
            yield Schedule(prefix)
            return
        for j in range(inst.n):
            if not placed[j] and all(placed[a] for a in preds[j]):
                placed[j] = True
                prefix.append(j)
                yield from rec()
                prefix.pop()
                placed[j] = False

    yield from rec()


@functools.lru_cache(maxsize=12)
def _permutations(n: int) -> np.ndarray:
    flat = itertools.chain.from_iterable(itertools.permutations(range(n)))
    return np.fromiter(flat, dtype=np.int8, count=n * math.factorial(n)).reshape(-1, n)


def _lcm_den(values) -> int:
    out = 1
    for x in values:
        out = math.lcm(out, Fraction(x).denominator)
    return out


def _scaled(matrix, factor: int, dtype) -> np.ndarray:
    return np.array([[int(x * factor) for x in row] for row in matrix], dtype=dtype)


@dataclass
class CostTable:
    """Every feasible schedule (rows of ``orders``) with its cost vector.

    ``costs`` holds integers; divide by ``scale`` for the true values.
    """

    orders: np.ndarray
    costs: np.ndarray
    scale: int

    def cost_fractions(self, row: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.scale) for c in self.costs[row])


def cost_table(inst: Instance, cap: int = DEFAULT_CAP) -> CostTable:
    """Evaluate all feasible schedules at once (lexicographic row order)."""
    if inst.n > cap:
        raise BudgetExceededError(f"n = {inst.n} exceeds the enumeration cap {cap}")
    perms = _permutations(inst.n)
    if inst.precedence:
        pos = np.argsort(perms, axis=1)
        ok = np.ones(len(perms), dtype=bool)
        for a, b in inst.precedence:
            ok &= pos[:, a] < pos[:, b]
        perms = perms[ok]
    tardy = inst.objective is Objective.MAX_WEIGHTED_TARDINESS
    time_scale = _lcm_den(x for m in ((inst.proc, inst.due) if tardy else (inst.proc,)) for r in m for x in r)
    w_scale = _lcm_den(x for r in inst.weight for x in r)
    max_p = sum(max(r) for r in inst.proc) * time_scale
    max_w = max((max(r) for r in inst.weight), default=0) * w_scale
    bound = max_p * max_w * (1 if tardy else inst.n) + 1
    dtype = np.int64 if bound < _INT64_SAFE else object
    p = _scaled(inst.proc, time_scale, dtype)
    w = _scaled(inst.weight, w_scale, dtype)
    d = _scaled(inst.due, time_scale, dtype)
    chunks = []
    step = max(1, 2_000_000 // max(1, inst.n * inst.k))
    for start in range(0, len(perms), step):
        block = perms[start:start + step]
        completion = np.cumsum(p[block], axis=1)
        if tardy:
            late = np.maximum(completion - d[block], 0)
            chunks.append((w[block] * late).max(axis=1))
        else:
            chunks.append((w[block] * completion).sum(axis=1))
    costs = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, inst.k), dtype=dtype)
    return CostTable(perms, costs, time_scale * w_scale)


def owa_scores(table: CostTable, v: OwaWeights) -> tuple[np.ndarray, int]:
    """Integer OWA score per row; true value = score / (table.scale * den)."""
    den = _lcm_den(v.v)
    weights = np.array([int(x * den) for x in v.v], dtype=table.costs.dtype)
    ordered = -np.sort(-table.costs, axis=1) if table.costs.dtype != object else np.array(
        [sorted(r, reverse=True) for r in table.costs], dtype=object)
    return ordered @ weights, den


def oracle_opt(inst: Instance, v: OwaWeights, cap: int = DEFAULT_CAP) -> SolveReport:
    """Exact OWA minimiser over all feasible schedules (ties: lexicographic)."""
    if len(v) != inst.k:
        raise ValueError("weight vector length differs from the scenario count")
    table = cost_table(inst, cap)
    scores, den = owa_scores(table, v)
    row = int(np.argmin(scores)) if table.costs.dtype != object else min(
        range(len(scores)), key=lambda r: (scores[r], r))
    sched = Schedule(int(j) for j in table.orders[row])
    return SolveReport(
        schedule=sched,
        objective=Fraction(int(scores[row]), table.scale * den),
        method="oracle",
        costs=table.cost_fractions(row),
        stats={"schedules": len(table.orders)},
    )


def oracle_psi(inst: Instance, k: int, t, table: CostTable | None = None) -> Fraction | None:
    """Brute-force min of the largest cost over schedules with cost <= t under S_k."""
    table = table if table is not None else cost_table(inst)
    limit = Fraction(t) * table.scale
    mask = np.array([c <= limit for c in table.costs[:, k]], dtype=bool)
    if not mask.any():
        return None
    return Fraction(int(table.costs[mask].max(axis=1).min()), table.scale)


def oracle_deterministic_wct(p: Sequence, w: Sequence, precedence=(), cap: int = DEFAULT_CAP) -> Schedule:
    """Exact single-scenario weighted completion time optimum."""
    inst = make_instance([[x] for x in p], None, [[x] for x in w], precedence,
                         Objective.WEIGHTED_COMPLETION_SUM)
    return oracle_opt(inst, OwaWeights([1]), cap).schedule


# -------------------------------------------------------------- generators

def gen_tight_ratio(k: int) -> Instance:
    """2K unit jobs on which the quantile approximation loses a factor K
    under the average criterion; only the last scenario pulls the even
    jobs' due dates one unit earlier."""
    if k < 2:
        raise ValueError("the tight family needs K >= 2")
    due = []
    for j in range(1, 2 * k + 1):
        row = [j] * k
        if j % 2 == 0:
            row[k - 1] = j - 1
        due.append(row)
    ones = [[1] * k for _ in range(2 * k)]
    return make_instance(ones, due, ones, (), Objective.MAX_WEIGHTED_TARDINESS)


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of signed 1-based variable indices (``-3`` is not x3)."""

    variables: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.variables:
                    raise ValueError(f"literal {lit} out of range 1..{self.variables}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied(self, bits: Sequence[bool]) -> list[bool]:
        return [any(bits[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses]


def parse_dimacs(text: str) -> CnfFormula:
    """Simplified DIMACS: ``p cnf n m`` header, clauses ended by ``0``."""
    n = m = None
    lits: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"bad header line {line!r}")
            n, m = int(parts[2]), int(parts[3])
            continue
        try:
            lits.extend(int(x) for x in line.split())
        except ValueError as e:
            raise FormatError(f"bad clause line {line!r}") from e
    if n is None:
        raise FormatError("missing 'p cnf' header")
    clauses, cur = [], []
    for x in lits:
        if x == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(x)
    if cur:
        raise FormatError("last clause is not terminated by 0")
    if len(clauses) != m:
        raise FormatError(f"header announces {m} clauses, found {len(clauses)}")
    return CnfFormula(n, tuple(clauses))


def to_dimacs(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.variables} {phi.m}"]
    lines += [" ".join(str(x) for x in c) + " 0" for c in phi.clauses]
    return "\n".join(lines) + "\n"


def _check_width(phi: CnfFormula, width: int) -> None:
    for c in phi.clauses:
        if len(c) > width:
            raise ValueError(f"clause {c} has more than {width} literals")
        if len({abs(x) for x in c}) != len(c):
            raise ValueError(f"clause {c} mentions a variable twice")


def literal_job(lit: int) -> int:
    """0-based job of a literal: x_i -> 2(i-1), not x_i -> 2(i-1)+1."""
    return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)


def gen_cnf_duedates(phi: CnfFormula) -> Instance:
    """Unit jobs ``J_{x_i}``, ``J_{not x_i}`` per variable, one due date
    scenario per clause: the literal's job is due at 2i-1, its partner and
    the jobs of absent variables at 2i."""
    _check_width(phi, 3)
    due = [[0] * phi.m for _ in range(2 * phi.variables)]
    for k, clause in enumerate(phi.clauses):
        for i in range(1, phi.variables + 1):
            due[2 * i - 2][k] = due[2 * i - 1][k] = 2 * i
        for lit in clause:
            due[literal_job(lit)][k] = 2 * abs(lit) - 1
    ones = [[1] * phi.m for _ in range(2 * phi.variables)]
    return make_instance(ones, due, ones, (), Objective.MAX_WEIGHTED_TARDINESS)


def gen_cnf_weights(phi: CnfFormula) -> Instance:
    """Deterministic unit jobs due at 2i-1; weight scenario per clause puts 1
    on the literal's job, plus a final scenario with every weight m."""
    _check_width(phi, 3)
    jobs, k = 2 * phi.variables, phi.m + 1
    weight = [[0] * k for _ in range(jobs)]
    for c, clause in enumerate(phi.clauses):
        for lit in clause:
            weight[literal_job(lit)][c] = 1
    for row in weight:
        row[-1] = phi.m
    due = [[2 * (j // 2) + 1] * k for j in range(jobs)]
    ones = [[1] * k for _ in range(jobs)]
    return make_instance(ones, due, weight, (), Objective.MAX_WEIGHTED_TARDINESS)


def gen_cnf_wct(phi: CnfFormula, L: int) -> tuple[Instance, OwaWeights]:
    """(p, w) scenario per 2-clause: the literal's job gets (0, 1), its
    negation (1, 0), absent variables (0, 0).  The weights zero out the
    ``L`` largest costs."""
    _check_width(phi, 2)
    if not 0 <= L < phi.m:
        raise ValueError(f"L must be in 0..{phi.m - 1}, got {L}")
    jobs = 2 * phi.variables
    p = [[0] * phi.m for _ in range(jobs)]
    w = [[0] * phi.m for _ in range(jobs)]
    for k, clause in enumerate(phi.clauses):
        for lit in clause:
            w[literal_job(lit)][k] = 1
            p[literal_job(-lit)][k] = 1
    inst = make_instance(p, None, w, (), Objective.WEIGHTED_COMPLETION_SUM)
    v = OwaWeights([0] * L + [Fraction(1, phi.m - L)] * (phi.m - L))
    return inst, v


def canonical_schedule(phi: CnfFormula, bits: Sequence[bool], construction: str) -> Schedule:
    """Schedule encoding an assignment.

    ``"duedates"``/``"weights"``: the pair of variable i occupies positions
    2i-1, 2i, the job of the false literal first.  ``"wct"``: all false
    literal jobs (ascending variable) then all true ones.
    """
    false_jobs = [literal_job(i + 1 if not b else -(i + 1)) for i, b in enumerate(bits)]
    true_jobs = [literal_job(i + 1 if b else -(i + 1)) for i, b in enumerate(bits)]
    if construction in ("duedates", "weights"):
        return Schedule(j for pair in zip(false_jobs, true_jobs) for j in pair)
    if construction == "wct":
        return Schedule(false_jobs + true_jobs)
    raise ValueError(f"unknown construction {construction!r}")


def assignment_cost_correspondence(phi: CnfFormula, bits: Sequence[bool], construction: str):
    """Predicted per-scenario cost pattern of the canonical schedule.

    Returns ``(pattern, schedule)``.  Due dates: cost 1 under a satisfied
    clause's scenario, 0 otherwise.  Weights: the same, followed by ``m``
    for the all-weights scenario.  WCT: 0 under a falsified clause and 1
    under a satisfied one, where 1 stands for "strictly positive" (a true
    literal's weight-1 job runs after its partner's unit job).
    """
    if len(bits) != phi.variables:
        raise ValueError("assignment length differs from the variable count")
    sched = canonical_schedule(phi, bits, construction)
    pattern = [int(s) for s in phi.satisfied(bits)]
    if construction == "weights":
        pattern.append(phi.m)
    return pattern, sched


def random_cnf(rng: random.Random, variables: int, clauses: int, width: int) -> CnfFormula:
    out = []
    for _ in range(clauses):
        size = rng.randint(1, min(width, variables))
        vars_ = rng.sample(range(1, variables + 1), size)
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vars_))
    return CnfFormula(variables, tuple(out))


def gen_random(
    seed: int,
    n: int,
    k: int,
    *,
    objective: Objective | str = Objective.MAX_WEIGHTED_TARDINESS,
    integral: bool = True,
    unit_time: bool = False,
    deterministic_p: bool = False,
    deterministic_w: bool = False,
    max_value: int = 20,
    precedence_density: float = 0.0,
    positive: bool = False,
) -> Instance:
    """Reproducible random instance.

    Values are drawn from ``0..max_value`` (``1..max_value`` with
    ``positive``), as integers or as multiples of 1/4 when not ``integral``.
    Precedence edges go from lower to higher positions of a random
    permutation, each with probability ``precedence_density``.
    """
    if n < 1 or k < 1:
        raise ValueError("n and K must be positive")
    if unit_time and max_value < 1:
        raise ValueError("unit_time needs max_value >= 1")
    if not 0 <= precedence_density <= 1:
        raise ValueError("precedence_density must be in [0, 1]")
    objective = Objective(objective)
    rng = random.Random(seed)
    lo = 1 if positive else 0

    def draw():
        x = rng.randint(lo, max_value)
        if not integral:
            x = Fraction(rng.randint(4 * lo, 4 * max_value), 4)
        return x

    def matrix(constant_rows: bool):
        rows = []
        for _ in range(n):
            if constant_rows:
                x = draw()
                rows.append([x] * k)
            else:
                rows.append([draw() for _ in range(k)])
        return rows

    proc = [[1] * k for _ in range(n)] if unit_time else matrix(deterministic_p)
    weight = matrix(deterministic_w)
    if objective is Objective.MAX_WEIGHTED_TARDINESS:
        horizon = max(1, sum(max(r) for r in proc))
        due = [[rng.randint(0, int(horizon)) for _ in range(k)] for _ in range(n)]
    else:
        due = [[0] * k for _ in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    edges = []
    if precedence_density > 0:
        for a, b in itertools.combinations(range(n), 2):
            if rng.random() < precedence_density:
                edges.append((perm[a], perm[b]))
    return make_instance(proc, due, weight, edges, objective)


def random_weights(rng: random.Random, k: int, nonincreasing: bool = False, max_part: int = 10) -> OwaWeights:
    """Random exact weights; sorted decreasingly when ``nonincreasing``."""
    raw = [rng.randint(0, max_part) for _ in range(k)]
    if sum(raw) == 0:
        raw[0] = 1
    total = sum(raw)
    vals = [Fraction(x, total) for x in raw]
    if nonincreasing:
        vals.sort(reverse=True)
    return OwaWeights(vals)


def true_owa(inst: Instance, sched: Schedule, v: OwaWeights) -> Fraction:
    return owa_value(v, cost_vector(inst, sched))
