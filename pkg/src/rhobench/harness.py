"""Experiment orchestration: configuration, scheduling, persistence.

An experiment is the cross-product of functions, dimensions, instances,
plateau sizes, algorithms and repeated runs. Every run gets its own seed
derived from the configuration keys, so any single cell can be reproduced
in isolation and the execution schedule never affects results. Artifacts
are CSV only: one trajectory file per (algorithm, fid, dim, rho) group
plus a manifest with one row per run.
"""

from __future__ import annotations

import json
import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import metrics
from .classic import es_run, ga_run, intea_run
from .cma import cma_run, default_alpha
from .discretize import DiscretizedProblem
from .errors import ConfigInvalid, ConfigSyntax, IoError
from .problems import SUPPORTED_FIDS, make_instance

PAPER_RHOS: Tuple[Optional[float], ...] = (None, 0.001, 0.01, 0.1, 0.5, 1.0, 2.0)

ALGORITHM_CODES = {
    "es": 1,
    "intea": 2,
    "ga": 3,
    "cmaes": 4,
    "cmaeswm1": 5,
    "cmaeswm2": 6,
}

# These need an integer grid (or a margin over one): rho=None is invalid.
DISCRETE_ONLY = frozenset({"intea", "ga", "cmaeswm1", "cmaeswm2"})

MANIFEST_COLUMNS = (
    "algorithm", "fid", "dim", "instance", "rho", "run", "seed", "budget",
    "evals_used", "final_delta", "hit_1e8_at", "status",
)
TRAJECTORY_COLUMNS = (
    "algorithm", "fid", "dim", "instance", "rho", "run", "seed", "eval", "delta",
)

DEFAULT_RUNS = 20
DEFAULT_INSTANCES = (0, 1, 2, 3, 4)
DEFAULT_BASE_SEED = 2023


@dataclass
class ExperimentConfig:
    """Validated description of one experiment grid."""

    fids: List[int]
    dims: List[int]
    algorithms: List[str]
    instances: List[int] = field(default_factory=lambda: list(DEFAULT_INSTANCES))
    rhos: List[Optional[float]] = field(default_factory=lambda: list(PAPER_RHOS))
    runs_per_instance: int = DEFAULT_RUNS
    budget_rule: Union[str, int] = "paper"
    base_seed: int = DEFAULT_BASE_SEED
    output_dir: str = "results"

    def budget_for(self, n: int) -> int:
        if self.budget_rule == "paper":
            return min(10_000 * n, 100_000)
        return int(self.budget_rule)

    def cell_count(self) -> int:
        return (len(self.fids) * len(self.dims) * len(self.instances)
                * len(self.rhos) * len(self.algorithms) * self.runs_per_instance)


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    for fid in cfg.fids:
        if fid not in SUPPORTED_FIDS:
            raise ConfigInvalid(f"fids: unknown function id {fid}")
    for n in cfg.dims:
        if not isinstance(n, int) or n < 1:
            raise ConfigInvalid(f"dims: invalid dimension {n}")
        if n < 2 and any(fid != 1 for fid in cfg.fids):
            raise ConfigInvalid(f"dims: dimension {n} only supports fid 1")
    for inst in cfg.instances:
        if not isinstance(inst, int) or inst < 0:
            raise ConfigInvalid(f"instances: invalid instance id {inst}")
    for rho in cfg.rhos:
        if rho is not None and not 0 < float(rho) <= 10.0:
            raise ConfigInvalid(f"rhos: plateau size {rho} out of (0, 10]")
    for alg in cfg.algorithms:
        if alg not in ALGORITHM_CODES:
            raise ConfigInvalid(f"algorithms: unknown algorithm {alg!r}")
        if alg in DISCRETE_ONLY and any(r is None for r in cfg.rhos):
            raise ConfigInvalid(
                f"algorithms: {alg!r} needs an integer grid, cannot pair with "
                "rho None (key: rhos)"
            )
    if cfg.runs_per_instance < 1:
        raise ConfigInvalid(f"runs_per_instance must be >= 1, got "
                            f"{cfg.runs_per_instance}")
    if cfg.budget_rule != "paper":
        try:
            budget = int(cfg.budget_rule)
        except (TypeError, ValueError):
            raise ConfigInvalid(f"budget_rule: expected 'paper' or an integer, "
                                f"got {cfg.budget_rule!r}") from None
        if budget < 1:
            raise ConfigInvalid(f"budget_rule: budget must be positive, got {budget}")
        cfg.budget_rule = budget
    if not cfg.fids or not cfg.dims or not cfg.algorithms or not cfg.rhos \
            or not cfg.instances:
        raise ConfigInvalid("fids, dims, algorithms, rhos and instances must "
                            "all be non-empty")
    return cfg


def config_from_dict(data: Dict) -> ExperimentConfig:
    """Build and validate a config from a plain dict (parsed JSON)."""
    if not isinstance(data, dict):
        raise ConfigSyntax("configuration must be a JSON object")
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(data) - known
    if unknown:
        raise ConfigInvalid(f"unknown configuration keys: {sorted(unknown)}")
    for required in ("fids", "dims", "algorithms"):
        if required not in data:
            raise ConfigInvalid(f"missing required key: {required}")
    return _validate(ExperimentConfig(**data))


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON experiment configuration file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigSyntax(f"cannot parse config {path}: {exc}") from exc
    return config_from_dict(data)


def rho_tag(rho: Optional[float]) -> str:
    """Stable text form of a plateau size ('None' or shortest float repr)."""
    return "None" if rho is None else repr(float(rho))


def _rho_code(rho: Optional[float]) -> int:
    return 0xFFFFFFFF if rho is None else int(round(float(rho) * 1e9))


def run_seed(base_seed: int, algorithm: str, fid: int, n: int, instance: int,
             rho: Optional[float], run_idx: int) -> int:
    """Derive the 64-bit seed of one run from its cell coordinates."""
    entropy = [
        base_seed & 0xFFFFFFFFFFFFFFFF,
        ALGORITHM_CODES[algorithm],
        fid,
        n,
        instance,
        _rho_code(rho),
        run_idx,
    ]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _dispatch(algorithm: str, dp: DiscretizedProblem, budget: int, seed: int):
    if algorithm == "es":
        return es_run(dp, budget, seed)
    if algorithm == "intea":
        return intea_run(dp, budget, seed)
    if algorithm == "ga":
        return ga_run(dp, budget, seed)
    if algorithm == "cmaes":
        return cma_run(dp, budget, seed, 0.0)
    if algorithm == "cmaeswm1":
        return cma_run(dp, budget, seed, default_alpha(dp.n, 1.0))
    if algorithm == "cmaeswm2":
        return cma_run(dp, budget, seed, default_alpha(dp.n, 2.0))
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _execute_task(task: Tuple) -> Dict:
    """Run one cell; never raises (failures are reported in the result)."""
    algorithm, fid, n, instance, rho, run_idx, budget, seed = task
    base = {
        "algorithm": algorithm, "fid": fid, "dim": n, "instance": instance,
        "rho": rho, "run": run_idx, "seed": seed, "budget": budget,
    }
    try:
        inst = make_instance(fid, n, instance)
        dp = DiscretizedProblem(inst, rho, budget)
        record = _dispatch(algorithm, dp, budget, seed)
    except Exception:
        return {**base, "status": "failed", "error": traceback.format_exc(),
                "evals_used": budget, "final_delta": math.inf,
                "hit_1e8_at": None, "trajectory": []}
    return {**base, "status": "ok", "error": None,
            "evals_used": record.evals_used, "final_delta": record.final_delta,
            "hit_1e8_at": record.hit_target_at,
            "trajectory": record.trajectory}


def _sort_key(result: Dict):
    return (result["algorithm"], result["fid"], result["dim"],
            rho_tag(result["rho"]), result["instance"], result["run"])


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> Dict:
    """Execute the configured cross-product and write manifest + trajectories.

    Re-running with the same config overwrites the same files with
    byte-identical content. Returns a small summary of what was written.
    """
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output dir {out}: {exc}") from exc

    tasks = []
    for algorithm in cfg.algorithms:
        for fid in cfg.fids:
            for n in cfg.dims:
                budget = cfg.budget_for(n)
                for rho in cfg.rhos:
                    for instance in cfg.instances:
                        for run_idx in range(cfg.runs_per_instance):
                            seed = run_seed(cfg.base_seed, algorithm, fid, n,
                                            instance, rho, run_idx)
                            tasks.append((algorithm, fid, n, instance, rho,
                                          run_idx, budget, seed))

    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        results = [_execute_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_task, tasks, chunksize=1))
    results.sort(key=_sort_key)

    manifest_rows = []
    groups: Dict[Tuple, List[Dict]] = {}
    for r in results:
        manifest_rows.append((
            r["algorithm"], r["fid"], r["dim"], r["instance"], rho_tag(r["rho"]),
            r["run"], r["seed"], r["budget"], r["evals_used"],
            float(r["final_delta"]),
            "" if r["hit_1e8_at"] is None else r["hit_1e8_at"],
            r["status"],
        ))
        key = (r["algorithm"], r["fid"], r["dim"], rho_tag(r["rho"]))
        groups.setdefault(key, []).append(r)

    try:
        metrics.write_csv(out / "manifest.csv", MANIFEST_COLUMNS, manifest_rows)
        traj_files = []
        for (algorithm, fid, n, tag), members in sorted(groups.items()):
            rows = []
            for r in members:
                for ev, delta in r["trajectory"]:
                    rows.append((algorithm, fid, n, r["instance"], tag,
                                 r["run"], r["seed"], ev, float(delta)))
            name = f"traj_{algorithm}_f{fid}_n{n}_rho_{tag}.csv"
            metrics.write_csv(out / name, TRAJECTORY_COLUMNS, rows)
            traj_files.append(name)
    except OSError as exc:
        raise IoError(f"cannot write results to {out}: {exc}") from exc

    failed = sum(1 for r in results if r["status"] != "ok")
    return {
        "runs": len(results),
        "failed": failed,
        "manifest": str(out / "manifest.csv"),
        "trajectory_files": traj_files,
    }


def _load_runs(results_dir) -> Dict[Tuple, List[SimpleNamespace]]:
    """Reconstruct per-run records from manifest + trajectory CSVs."""
    out = Path(results_dir)
    manifest = out / "manifest.csv"
    if not manifest.exists():
        raise IoError(f"missing manifest: {manifest}")
    runs: Dict[Tuple, SimpleNamespace] = {}
    with open(manifest) as fh:
        header = fh.readline().strip().split(",")
        idx = {c: i for i, c in enumerate(header)}
        for line in fh:
            parts = line.rstrip("\n").split(",")
            key = (parts[idx["algorithm"]], int(parts[idx["fid"]]),
                   int(parts[idx["dim"]]), parts[idx["rho"]],
                   int(parts[idx["instance"]]), int(parts[idx["run"]]))
            runs[key] = SimpleNamespace(
                trajectory=[],
                evals_used=int(parts[idx["evals_used"]]),
                budget=int(parts[idx["budget"]]),
            )
    for traj in sorted(out.glob("traj_*.csv")):
        with open(traj) as fh:
            header = fh.readline().strip().split(",")
            idx = {c: i for i, c in enumerate(header)}
            for line in fh:
                parts = line.rstrip("\n").split(",")
                key = (parts[idx["algorithm"]], int(parts[idx["fid"]]),
                       int(parts[idx["dim"]]), parts[idx["rho"]],
                       int(parts[idx["instance"]]), int(parts[idx["run"]]))
                if key in runs:
                    runs[key].trajectory.append(
                        (int(parts[idx["eval"]]), float(parts[idx["delta"]]))
                    )
    groups: Dict[Tuple, List[SimpleNamespace]] = {}
    for (algorithm, fid, n, tag, _inst, _run), rec in sorted(runs.items()):
        groups.setdefault((algorithm, fid, n, tag), []).append(rec)
    return groups


def summarize(results_dir, metric: str, phi: float = 1e-8,
              budgets: Optional[Sequence[int]] = None,
              out_dir=None) -> List[str]:
    """Write the requested summary CSV from a results directory.

    metric is one of success, ert, ecdf. For success, `budgets` selects
    the fixed-budget cross-cuts (default: each group's own budget); for
    ert, `phi` is the target; for ecdf the default 51-target set and a
    log-spaced budget grid are used.
    """
    groups = _load_runs(results_dir)
    out = Path(out_dir) if out_dir is not None else Path(results_dir)
    written = []
    if metric == "success":
        rows = []
        for (algorithm, fid, n, tag), records in sorted(groups.items()):
            cuts = budgets if budgets else [records[0].budget]
            for b in cuts:
                rate = metrics.success_rate(records, phi, int(b))
                rows.append((algorithm, fid, n, tag, int(b), rate))
        path = out / "success.csv"
        metrics.write_csv(path, metrics.SUCCESS_COLUMNS, rows)
        written.append(str(path))
    elif metric == "ert":
        rows = []
        for (algorithm, fid, n, tag), records in sorted(groups.items()):
            cuts = budgets if budgets else [records[0].budget]
            for b in cuts:
                value = metrics.ert(records, phi, int(b))
                rows.append((algorithm, fid, n, tag, phi, value))
        path = out / "ert.csv"
        metrics.write_csv(path, metrics.ERT_COLUMNS, rows)
        written.append(str(path))
    elif metric == "ecdf":
        targets = metrics.default_targets()
        rows = []
        for (algorithm, fid, n, tag), records in sorted(groups.items()):
            grid = budgets if budgets else metrics.default_ecdf_budgets(
                records[0].budget)
            for b, frac in metrics.ecdf(records, targets, grid):
                rows.append((algorithm, fid, n, tag, b, frac))
        path = out / "ecdf.csv"
        metrics.write_csv(path, metrics.ECDF_COLUMNS, rows)
        written.append(str(path))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return written


def write_landscape_csv(path, grid: np.ndarray) -> None:
    """Write a landscape grid as CSV with header x1[,x2],f."""
    n = grid.shape[1] - 1
    columns = [f"x{i + 1}" for i in range(n)] + ["f"]
    metrics.write_csv(path, columns, [tuple(map(float, row)) for row in grid])
