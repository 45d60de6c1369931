"""Comparing OWA criteria on a small max weighted tardiness instance."""
from fractions import Fraction

from owasched import cost_vector, preset
from owasched import tardiness as T
from owasched import testkit as tk

# Six jobs, three scenarios, integral data and a sparse precedence graph.
inst = tk.gen_random(5, 6, 3, max_value=12, precedence_density=0.2)
print("precedence:", sorted((a + 1, b + 1) for a, b in inst.precedence))

# The minmax schedule comes from the backward greedy in O(K n^2).
rep = T.solve_minmax(inst)
print("minmax   ", rep.schedule.one_based(), "costs", [str(c) for c in rep.costs])

# Min-min picks the best of the per-scenario optima.
rep = T.solve_min_min(inst)
print("min-min  ", rep.schedule.one_based(), "costs", [str(c) for c in rep.costs])

# Hurwicz mixes both; each scenario's breakpoint sweep gives a handful of candidates.
for alpha in (Fraction(1, 4), Fraction(3, 4)):
    rep = T.solve_hurwicz(inst, alpha)
    print(f"hurwicz {alpha}", rep.schedule.one_based(), "value", rep.objective, rep.stats)

trace = T.hurwicz_breakpoints(inst, 0)
print("Psi_1 breakpoints:", [str(b) for b in trace.breakpoints], "values:", [str(v) for v in trace.values])

# The median is a quantile; arbitrary weights go through the threshold search.
print("median   ", T.solve_quantile(inst, 2).objective)
v = preset("average", 3)
exact = T.solve_owa_bounded(inst, v)
approx = T.approx_owa_quantile(inst, v)
print("average: exact", exact.objective, "| approx", approx.objective, "with guarantee", approx.guarantee)
print("oracle agrees:", tk.oracle_opt(inst, v).objective == exact.objective)

# On the tight family the approximation really is K times off.
for K in (2, 3, 4):
    fam = tk.gen_tight_ratio(K)
    a = T.approx_owa_quantile(fam, preset("average", K))
    b = T.solve_owa_bounded(fam, preset("average", K))
    print(f"K={K}: approx {a.objective}, optimum {b.objective}, costs {[str(c) for c in cost_vector(fam, b.schedule)]}")
