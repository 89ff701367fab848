"""Show how a plateau size reshapes a 1D landscape.

The sphere keeps its optimum under every plateau size because the grid is
translated so the optimum stays representable; what changes is the number
of distinct function values an optimizer can observe.
"""

import rhobench as rb
from rhobench.discretize import DiscretizedProblem

inst = rb.make_instance(1, 1, 0)
print(f"sphere instance 0 in 1D: x_opt={inst.x_opt[0]:+.3f} "
      f"f_opt={inst.f_opt:+.3f}\n")

for rho in (None, 0.5, 1.0, 2.0):
    dp = DiscretizedProblem(inst, rho)
    grid = dp.landscape_grid(61)
    deltas = grid[:, 1] - inst.f_opt
    label = "continuous" if rho is None else f"rho={rho}"
    print(f"{label:11s} distinct values: {len(set(grid[:, 1])):3d}   "
          f"min delta: {deltas.min():.3g}")
    # crude terminal sketch: one row per plateau size, 61 columns
    lo, hi = deltas.min(), deltas.max()
    bins = " .:-=+*#%@"
    row = "".join(bins[int((d - lo) / (hi - lo) * (len(bins) - 1))]
                  for d in deltas)
    print(f"{'':11s} {row}\n")

print("the optimum is preserved exactly for every plateau size:")
for rho in (0.001, 0.01, 0.1, 0.5, 1.0, 2.0):
    dp = DiscretizedProblem(inst, rho, budget=1)
    print(f"  rho={rho:<6} delta(x_opt) = "
          f"{dp.eval_continuous(inst.x_opt) - inst.f_opt}")
