"""Unimodal continuous test functions with seeded, shifted instances.

Five functions are provided, identified by the ids 1, 2, 5, 8 and 9:
sphere, ellipsoid, linear slope, Rosenbrock and rotated Rosenbrock. Each
instance shifts the optimum location and value so that repeated
benchmarking does not overfit a fixed optimum at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDimension,
    NonFiniteInput,
    UnsupportedFunction,
)

SUPPORTED_FIDS = (1, 2, 5, 8, 9)

DEFAULT_LOWER = -5.0
DEFAULT_UPPER = 5.0

# Optimum shifts are drawn from [-4, 4] so the optimum plateau never gets
# clipped by the bound clamp for plateau sizes up to 2.
_XOPT_RANGE = 4.0
_FOPT_RANGE = 100.0


@dataclass(frozen=True)
class Domain:
    """Hypercube search domain with identical scalar bounds per coordinate."""

    n: int
    lb: float = DEFAULT_LOWER
    ub: float = DEFAULT_UPPER

    def __post_init__(self):
        if self.n < 1:
            raise InvalidDimension(f"dimension must be >= 1, got {self.n}")
        if not self.lb < self.ub:
            raise ValueError(f"need lb < ub, got [{self.lb}, {self.ub}]")

    @property
    def width(self) -> float:
        return self.ub - self.lb


@dataclass(frozen=True)
class ProblemInstance:
    """One seeded test function: formula, optimum location and value."""

    fid: int
    domain: Domain
    instance_id: int
    x_opt: np.ndarray
    f_opt: float
    rotation: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.domain.n

    def evaluate_raw(self, x) -> float:
        """Evaluate the raw function value, including the optimum offset.

        Accepts a single vector of length n or a batch of shape (m, n); a
        batch returns an array of m values. Pure: no counters are touched
        and no bound check is performed here.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DimensionMismatch(
                f"expected vectors of length {self.n}, got shape {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise NonFiniteInput("input contains NaN or infinite coordinates")
        value = _FORMULAS[self.fid](self, x)
        if x.ndim == 1:
            return float(value)
        return value

    def optimum(self) -> Tuple[np.ndarray, float]:
        """Return (x_opt, f_opt) of this instance."""
        return self.x_opt, self.f_opt


def _instance_rng(fid: int, n: int, instance_id: int) -> np.random.Generator:
    # Counter-based generator keyed on the instance triple: bit-identical
    # instances on every platform and call.
    seed = np.random.SeedSequence([fid, n, instance_id])
    return np.random.Generator(np.random.Philox(seed))


def _gram_schmidt(mat: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of a square matrix (two passes)."""
    q = np.array(mat, dtype=float)
    for _ in range(2):
        for i in range(q.shape[1]):
            for j in range(i):
                q[:, i] -= (q[:, j] @ q[:, i]) * q[:, j]
            q[:, i] /= np.linalg.norm(q[:, i])
    return q


def make_instance(fid: int, n: int, instance_id: int) -> ProblemInstance:
    """Construct the seeded instance of function `fid` in dimension `n`.

    Identical arguments always produce a bit-identical instance. The
    optimum location is drawn uniformly from [-4, 4]^n (on the domain
    boundary for the linear slope), the optimal value uniformly from
    [-100, 100].
    """
    if fid not in SUPPORTED_FIDS:
        raise UnsupportedFunction(f"unknown function id {fid}")
    min_n = 1 if fid == 1 else 2
    if n < min_n:
        raise InvalidDimension(f"function {fid} requires n >= {min_n}, got {n}")
    if instance_id < 0:
        raise ValueError(f"instance_id must be >= 0, got {instance_id}")

    domain = Domain(n)
    rng = _instance_rng(fid, n, instance_id)
    rotation = None
    if fid == 5:
        signs = rng.choice([-1.0, 1.0], size=n)
        x_opt = domain.ub * signs
    else:
        x_opt = rng.uniform(-_XOPT_RANGE, _XOPT_RANGE, size=n)
    f_opt = float(rng.uniform(-_FOPT_RANGE, _FOPT_RANGE))
    if fid == 9:
        rotation = _gram_schmidt(rng.standard_normal((n, n)))
        rotation.setflags(write=False)
    x_opt.setflags(write=False)
    return ProblemInstance(fid, domain, instance_id, x_opt, f_opt, rotation)


def _sphere(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    z = x - inst.x_opt
    return np.sum(z * z, axis=-1) + inst.f_opt


def _ellipsoid(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    n = inst.n
    z = x - inst.x_opt
    coeff = 10.0 ** (6.0 * np.arange(n) / (n - 1))
    return np.sum(coeff * z * z, axis=-1) + inst.f_opt


def _linear_slope(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    n = inst.n
    s = np.sign(inst.x_opt) * 10.0 ** (np.arange(n) / (n - 1))
    # Coordinates already past the optimum's bound contribute nothing.
    z = np.where(x * inst.x_opt < inst.domain.ub**2, x, inst.x_opt)
    return np.sum(inst.domain.ub * np.abs(s) - s * z, axis=-1) + inst.f_opt


def _rosenbrock_terms(z: np.ndarray) -> np.ndarray:
    a = z[..., :-1]
    b = z[..., 1:]
    return np.sum(100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2, axis=-1)


def _rosenbrock(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    gamma = max(1.0, np.sqrt(inst.n) / 8.0)
    z = gamma * (x - inst.x_opt) + 1.0
    return _rosenbrock_terms(z) + inst.f_opt


def _rosenbrock_rotated(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    gamma = max(1.0, np.sqrt(inst.n) / 8.0)
    z = gamma * ((x - inst.x_opt) @ inst.rotation.T) + 1.0
    return _rosenbrock_terms(z) + inst.f_opt


_FORMULAS = {
    1: _sphere,
    2: _ellipsoid,
    5: _linear_slope,
    8: _rosenbrock,
    9: _rosenbrock_rotated,
}
