"""Plateau-size discretization of a continuous problem.

A plateau size rho turns the continuous domain into a grid of axis-aligned
plateaus of width rho: every point is snapped to the left edge of its
plateau, translated so the original optimum stays representable, and
clamped back into the box. The same landscape is exposed in two views: a
continuous one for real-vector optimizers and an integer one (plateau
indices) for discrete optimizers. Both views share one evaluation meter.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    BudgetExhausted,
    DimensionMismatch,
    InvalidPlateauSize,
    NotDiscretized,
    UnsupportedDimension,
)
from .problems import ProblemInstance

# Guard against binary-representation jitter: a coordinate within this
# distance of a plateau edge (in units of rho) counts as lying on the edge.
_EDGE_TOL = 1e-12


def plateau_index(x, rho: float):
    """Integer plateau index floor(x / rho), with an edge round-trip guard."""
    if rho <= 0:
        raise InvalidPlateauSize(f"plateau size must be positive, got {rho}")
    q = np.asarray(x, dtype=float) / rho
    r = np.round(q)
    return np.where(np.abs(q - r) < _EDGE_TOL, r, np.floor(q))


def snap_to_plateau(x, rho: float):
    """Snap each coordinate to the left edge of its plateau of width rho.

    Uses floored division, so negative coordinates snap downward as well:
    snap(-1.3, 0.5) = -1.5. Multiples of rho are fixed points.
    """
    return plateau_index(x, rho) * rho


class DiscretizedProblem:
    """A problem instance seen through a plateau size, with metered views.

    One object belongs to exactly one optimizer run: it counts every
    evaluation (feasible or not) against `budget` and records the
    best-so-far improvement trajectory in terms of delta = f - f_opt.
    `rho=None` means no discretization; the continuous view then passes
    evaluations straight through.
    """

    def __init__(self, inst: ProblemInstance, rho: Optional[float] = None,
                 budget: int = 10**9):
        if rho is not None:
            if not rho > 0 or rho > inst.domain.width:
                raise InvalidPlateauSize(
                    f"plateau size must be in (0, {inst.domain.width}], got {rho}"
                )
        if budget < 0:
            raise ValueError(f"budget must be >= 0, got {budget}")
        self.inst = inst
        self.rho = rho
        self.budget = budget
        if rho is None:
            self.t = np.zeros(inst.n)
        else:
            # Translation that puts the optimum back on the grid; defined as
            # the snap residue so snap(x_opt) + t == x_opt bitwise.
            self.t = inst.x_opt - snap_to_plateau(inst.x_opt, rho)
        self.t.setflags(write=False)
        self.eval_count = 0
        self.best_delta = float("inf")
        self.trajectory: List[Tuple[int, float]] = []

    @property
    def n(self) -> int:
        return self.inst.n

    def remaining(self) -> int:
        return self.budget - self.eval_count

    def shift_and_clamp(self, x_rho):
        """Translate snapped coordinates by t and clamp into the box."""
        d = self.inst.domain
        return np.clip(x_rho + self.t, d.lb, d.ub)

    def transform(self, x):
        """Map raw coordinates to the point the objective actually sees."""
        if self.rho is None:
            return np.asarray(x, dtype=float)
        return self.shift_and_clamp(snap_to_plateau(x, self.rho))

    def integer_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Inclusive integer grid bounds: indices whose plateau edge is in-domain."""
        if self.rho is None:
            raise NotDiscretized("integer bounds require a plateau size")
        d = self.inst.domain
        zlb = _guarded_ceil(d.lb / self.rho)
        zub = _guarded_floor(d.ub / self.rho)
        return (np.full(self.n, zlb, dtype=np.int64),
                np.full(self.n, zub, dtype=np.int64))

    def _meter(self, value: float) -> float:
        delta = value - self.inst.f_opt
        if delta < self.best_delta:
            self.best_delta = delta
            self.trajectory.append((self.eval_count, delta))
        return value

    def _charge(self):
        if self.eval_count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations consumed")
        self.eval_count += 1

    def eval_continuous(self, x) -> float:
        """Evaluate a real vector through the discretized landscape.

        Out-of-box proposals evaluate to +inf (hard box constraints) but
        still cost one evaluation.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected shape ({self.n},), got {x.shape}")
        self._charge()
        d = self.inst.domain
        if not (np.all(x >= d.lb) and np.all(x <= d.ub)):
            return self._meter(float("inf"))
        return self._meter(self.inst.evaluate_raw(self.transform(x)))

    def eval_integer(self, z) -> float:
        """Evaluate an integer grid point; shares the meter with eval_continuous."""
        if self.rho is None:
            raise NotDiscretized("integer view requires a plateau size")
        z = np.asarray(z)
        if z.shape != (self.n,):
            raise DimensionMismatch(f"expected shape ({self.n},), got {z.shape}")
        self._charge()
        zlb, zub = self.integer_bounds()
        if not (np.all(z >= zlb) and np.all(z <= zub)):
            return self._meter(float("inf"))
        return self._meter(
            self.inst.evaluate_raw(self.shift_and_clamp(z * self.rho))
        )

    def landscape_grid(self, points_per_axis: int) -> np.ndarray:
        """Uniform grid of (coordinates..., f) samples over the whole box.

        Evaluates through the discretization transform without touching
        the evaluation meter. Only defined for 1 and 2 dimensions; rows are
        ordered with the last axis varying fastest.
        """
        if self.n > 2:
            raise UnsupportedDimension(
                f"landscape grids support n in {{1, 2}}, got {self.n}"
            )
        if points_per_axis < 2:
            raise ValueError("points_per_axis must be >= 2")
        d = self.inst.domain
        axis = np.linspace(d.lb, d.ub, points_per_axis)
        if self.n == 1:
            pts = axis[:, None]
        else:
            x1, x2 = np.meshgrid(axis, axis, indexing="ij")
            pts = np.column_stack([x1.ravel(), x2.ravel()])
        values = self.inst.evaluate_raw(self.transform(pts))
        return np.column_stack([pts, values])


def _guarded_ceil(q: float) -> int:
    r = round(q)
    if abs(q - r) < _EDGE_TOL:
        return int(r)
    return int(np.ceil(q))


def _guarded_floor(q: float) -> int:
    r = round(q)
    if abs(q - r) < _EDGE_TOL:
        return int(r)
    return int(np.floor(q))
