"""Fixed-target and fixed-budget performance measures over run records.

All measures are derived from improvement trajectories: ordered
(evaluation index, best-so-far delta) events per run, where delta is the
objective distance to the instance's optimal value.
"""

from __future__ import annotations

import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import EmptyGroup

# Column schemas of the summary CSVs.
SUCCESS_COLUMNS = ("algorithm", "fid", "n", "rho", "budget", "rate")
ERT_COLUMNS = ("algorithm", "fid", "n", "rho", "target", "ert")
ECDF_COLUMNS = ("algorithm", "fid", "n", "rho", "budget", "fraction")


def default_targets() -> np.ndarray:
    """The 51 logarithmically spaced targets from 1e2 down to 1e-8."""
    return 10.0 ** np.linspace(2.0, -8.0, 51)


def default_ecdf_budgets(budget: int, points: int = 100) -> np.ndarray:
    """Log-spaced budget grid from 10 to the run budget (unique integers)."""
    top = max(budget, 10)
    grid = np.unique(np.rint(np.geomspace(10, top, points)).astype(int))
    return grid[grid <= budget] if budget >= 10 else np.array([budget])


def hitting_time(record, phi: float):
    """First evaluation index with delta strictly below phi; inf if never."""
    for ev, delta in record.trajectory:
        if delta < phi:
            return ev
    return math.inf


def best_delta_at(record, budget: int) -> float:
    """Best-so-far delta after `budget` evaluations (inf before any event)."""
    best = math.inf
    for ev, delta in record.trajectory:
        if ev > budget:
            break
        best = delta
    return best


def success_rate(records: Sequence, phi: float, budget: int) -> float:
    """Fraction of runs that hit phi within the given budget."""
    if not records:
        raise EmptyGroup("success_rate over an empty record list")
    hits = sum(1 for r in records if hitting_time(r, phi) <= budget)
    return hits / len(records)


def ert(records: Sequence, phi: float, budget: int) -> float:
    """Expected running time to target phi.

    Sum of evaluation counts, with unsuccessful runs contributing their
    consumed budget (capped at `budget`), divided by the number of
    successful runs; +inf when no run succeeds.
    """
    if not records:
        raise EmptyGroup("ert over an empty record list")
    total = 0.0
    successes = 0
    for r in records:
        t = hitting_time(r, phi)
        if t <= budget:
            total += t
            successes += 1
        else:
            total += min(r.evals_used, budget)
    if successes == 0:
        return math.inf
    return total / successes


def ecdf(records: Sequence, targets: np.ndarray,
         budgets: Iterable[int]) -> List[Tuple[int, float]]:
    """Fraction of targets reached, averaged over runs, per budget.

    A target phi counts as reached at budget b when the best-so-far delta
    at b is not above it (phi >= delta). The curve is non-decreasing in b
    with values in [0, 1].
    """
    if not records:
        raise EmptyGroup("ecdf over an empty record list")
    targets = np.asarray(targets, dtype=float)
    curve = []
    for b in budgets:
        frac = 0.0
        for r in records:
            best = best_delta_at(r, b)
            frac += float(np.count_nonzero(targets >= best)) / targets.size
        curve.append((int(b), frac / len(records)))
    return curve


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows as CSV with deterministic shortest-roundtrip formatting."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def _format_cell(value) -> str:
    if value is None:
        return "None"
    if isinstance(value, float):
        return repr(value)
    return str(value)
