"""Instances built from CNF formulas, and how assignments map to costs."""
import itertools

from owasched import cost_vector
from owasched import testkit as tk

phi = tk.parse_dimacs("""p cnf 3 4
1 -2 3 0
-1 2 0
2 3 0
-3 0
""")
inst = tk.gen_cnf_duedates(phi)
print("due dates (jobs x1, ~x1, x2, ...):")
for j, row in enumerate(inst.due):
    print(f"  J{j + 1}", [int(d) for d in row])

# Every assignment's canonical schedule is late exactly under satisfied clauses,
# so the average cost counts satisfied clauses.
for bits in itertools.product([False, True], repeat=phi.variables):
    pattern, sched = tk.assignment_cost_correspondence(phi, bits, "duedates")
    costs = cost_vector(inst, sched)
    print("".join("1" if b else "0" for b in bits), pattern, [int(c) for c in costs])

# The 2-literal variant for completion times: falsified clauses cost nothing.
phi2 = tk.CnfFormula(3, ((1, -2), (-1, 3), (2, 3)))
inst2, v = tk.gen_cnf_wct(phi2, 1)
for bits in [(False, False, False), (True, True, True)]:
    _, sched = tk.assignment_cost_correspondence(phi2, bits, "wct")
    print(bits, [int(c) for c in cost_vector(inst2, sched)])
