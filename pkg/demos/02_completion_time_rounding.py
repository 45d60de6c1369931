"""LP rounding for the weighted sum of completion times."""
import numpy as np

from owasched import preset
from owasched import testkit as tk
from owasched import wct as W

inst = tk.gen_random(7, 7, 3, objective="sum_wc", deterministic_p=True, positive=True,
                     max_value=9, precedence_density=0.15)
v = preset("average", 3)

model = W.build_owa_lp(inst, v)
print(f"relaxation: {model.lp.num_vars} variables, {model.lp.num_rows} rows")

rep = W.approx_lp_rounding(inst, v)
cstar = np.array(rep.extra["lp_completion_times"])
print("LP completion times:", np.round(cstar, 3))
print("rounded order:      ", rep.schedule.one_based())
print(f"OWA {float(rep.objective):.3f}  LP bound {rep.lower_bound:.3f}  pivots {rep.stats['lp_pivots']}")

opt = tk.oracle_opt(inst, v).objective
print(f"optimum {float(opt):.3f}, observed ratio {float(rep.objective / opt):.3f} (guarantee 2)")

# The aggregate heuristic needs no LP but has a weaker guarantee.
agg = W.approx_aggregate(inst, v)
print(f"aggregate: OWA {float(agg.objective):.3f}, guarantee {agg.guarantee}")

# Hurwicz becomes K minmax relaxations with reweighted scenarios.
hur = W.solve_hurwicz_wct(inst, 0.5)
print("hurwicz(1/2):", hur.schedule.one_based(), float(hur.objective), "bound", round(hur.lower_bound, 3))
