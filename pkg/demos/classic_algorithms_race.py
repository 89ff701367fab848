"""Race the three classical EAs across plateau sizes on the 5D sphere.

The integer EA handles every plateau size, the GA collapses once the grid
becomes fine (too many values to resample blindly), and the continuous ES
barely notices the discretization.
"""

import rhobench as rb
from rhobench.discretize import DiscretizedProblem
from rhobench.metrics import ert, success_rate

BUDGET = 20_000
RUNS = 10

print(f"{'rho':>8} {'ES rate':>8} {'ES ERT':>9} {'intEA rate':>11} "
      f"{'intEA ERT':>10} {'GA rate':>8} {'GA ERT':>9}")

for rho in (0.001, 0.1, 2.0):
    row = [f"{rho:>8}"]
    for name, runner in (("es", rb.es_run), ("intea", rb.intea_run),
                         ("ga", rb.ga_run)):
        records = []
        for idx in range(RUNS):
            dp = DiscretizedProblem(rb.make_instance(1, 5, idx % 5), rho,
                                    BUDGET)
            records.append(runner(dp, BUDGET, 1000 + idx))
        rate = success_rate(records, 1e-8, BUDGET)
        expected = ert(records, 1e-8, BUDGET)
        row.append(f"{rate:>8.2f} {expected:>9.0f}"
                   if name == "es" else f"{rate:>11.2f} {expected:>10.0f}"
                   if name == "intea" else f"{rate:>8.2f} {expected:>9.0f}")
    print(" ".join(row))

print("\ncontinuous baseline (rho absent), ES only:")
records = [rb.es_run(DiscretizedProblem(rb.make_instance(1, 5, i % 5), None,
                                        BUDGET), BUDGET, 1000 + i)
           for i in range(RUNS)]
print(f"  rate={success_rate(records, 1e-8, BUDGET):.2f} "
      f"ERT={ert(records, 1e-8, BUDGET):.0f}")
