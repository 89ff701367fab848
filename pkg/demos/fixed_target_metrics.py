"""The three performance measures on a handful of hand-made runs.

Trajectories store improvement events only: (evaluation index, best-so-far
distance to the optimal value). Everything below derives from those.
"""

from types import SimpleNamespace

from rhobench.metrics import (
    default_targets,
    ecdf,
    ert,
    hitting_time,
    success_rate,
)

run = lambda traj, used: SimpleNamespace(trajectory=traj, evals_used=used,
                                         budget=1000)

runs = [
    run([(3, 80.0), (50, 0.4), (100, 2e-9)], 100),   # solves quickly
    run([(5, 12.0), (200, 3e-9)], 200),              # solves slowly
    run([(4, 95.0), (150, 0.02)], 1000),             # stalls at 0.02
]

print("hitting times for target 1e-8:",
      [hitting_time(r, 1e-8) for r in runs])
print("success rate within 1000 evals:",
      round(success_rate(runs, 1e-8, 1000), 3))
print("expected running time:", round(ert(runs, 1e-8, 1000), 1),
      "(hits 100+200 plus the stalled run's 1000, over 2 successes)")

targets = default_targets()
print(f"\ntarget set: {targets.size} values from {targets[0]} to {targets[-1]}")

print("\nfraction of targets reached (averaged over runs):")
for budget, fraction in ecdf(runs, targets, [10, 100, 300, 1000]):
    print(f"  budget {budget:>5} -> {fraction:.3f}")
