"""Watch CMA-ES freeze on a plateau and the margin keep it moving.

On quantized landscapes the step size can self-adapt below the plateau
width; sampling then never leaves the current plateau and the search
stalls one box away from the optimum (best delta = rho^2 on the sphere).
The margin variant lower-bounds the per-coordinate probability of leaving
the mean's plateau, which keeps the effective sampling step alive. The
seed below is one of the runs where the canonical variant stalls.
"""

import numpy as np

import rhobench as rb
from rhobench.discretize import DiscretizedProblem

N, RHO, BUDGET, SEED = 10, 0.1, 30_000, 500_035

print(f"quantized sphere: n={N}, rho={RHO}, budget={BUDGET}, seed={SEED}\n")

for label, alpha in (("canonical", 0.0), ("with margin", rb.default_alpha(N))):
    print(f"--- {label} (alpha={alpha:.4g}) ---")
    trace = []
    dp = DiscretizedProblem(rb.make_instance(1, N, 0), RHO, BUDGET)

    def observe(state=None, margin=None, best_fitness=None):
        step = state.sigma * np.sqrt(np.diag(state.C).max())
        scaled = state.sigma * margin.A * np.sqrt(np.diag(state.C))
        trace.append((dp.eval_count, dp.best_delta, step, scaled.max()))

    record = rb.cma_run(dp, BUDGET, SEED, alpha, observer=observe)
    for evals, delta, step, eff in trace[:: max(1, len(trace) // 8)]:
        print(f"  evals {evals:>6}  best delta {delta:>10.3e}  "
              f"step {step:>10.3e}  sampled step {eff:>10.3e}")
    outcome = (f"solved at eval {record.hit_target_at}"
               if record.hit_target_at else
               f"stalled with delta {record.final_delta:.3e}")
    print(f"  -> {outcome}\n")
