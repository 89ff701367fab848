"""End-to-end mini experiment: configure, run, summarize.

Writes everything into ./demo_results: a manifest, improvement-event
trajectories per group, and the three summary CSVs the plotting sidecar
consumes.
"""

from pathlib import Path

from rhobench import harness

config = harness.config_from_dict({
    "fids": [1, 8],
    "dims": [2, 5],
    "algorithms": ["es", "cmaes"],
    "instances": [0, 1],
    "rhos": [None, 0.1, 1.0],
    "runs_per_instance": 3,
    "budget_rule": 4000,
    "base_seed": 31,
    "output_dir": "demo_results",
})

summary = harness.run_experiment(config, workers=2)
print(f"executed {summary['runs']} runs ({summary['failed']} failed)")
print(f"manifest: {summary['manifest']}")

for metric in ("success", "ert", "ecdf"):
    for path in harness.summarize("demo_results", metric):
        lines = Path(path).read_text().splitlines()
        print(f"\n{path} ({len(lines) - 1} rows)")
        for line in lines[:4]:
            print(f"  {line}")
