"""Classical evolutionary algorithms under a common run-loop contract.

Three solvers share the population sizes mu=4, lambda=28: a comma ES with
self-adaptive step size on the continuous view, an integer EA with the
two-sided geometric (maximum entropy) mutation, and a plus-selection GA
with uniform resampling mutation. Each run is driven by a seeded generator
and a metered :class:`~rhobench.discretize.DiscretizedProblem`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .discretize import DiscretizedProblem
from .errors import BudgetTooSmall, InvalidDeviation, NotDiscretized

MU = 4
LAMBDA = 28

# A run counts as solved once delta = f - f_opt drops below this target.
TARGET_DELTA = 1e-8

# Keeps lognormal self-adaptation from freezing at denormal step sizes.
STEP_FLOOR = 1e-10


@dataclass
class RunRecord:
    """Outcome of a single optimizer run."""

    algorithm: str
    fid: int
    n: int
    instance_id: int
    rho: Optional[float]
    seed: int
    budget: int
    evals_used: int
    trajectory: List[Tuple[int, float]] = field(repr=False)
    final_delta: float
    hit_target_at: Optional[int]


def run_rng(seed: int) -> np.random.Generator:
    """Seeded counter-based generator; accepts any 64-bit value."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    )


def finish_record(algorithm: str, dp: DiscretizedProblem, seed: int) -> RunRecord:
    """Assemble the RunRecord from the problem's meter after a run."""
    traj = list(dp.trajectory)
    final_delta = traj[-1][1] if traj else float("inf")
    hit_at = next((e for e, d in traj if d < TARGET_DELTA), None)
    return RunRecord(
        algorithm=algorithm,
        fid=dp.inst.fid,
        n=dp.n,
        instance_id=dp.inst.instance_id,
        rho=dp.rho,
        seed=seed,
        budget=dp.budget,
        evals_used=dp.eval_count,
        trajectory=traj,
        final_delta=final_delta,
        hit_target_at=hit_at,
    )


def max_entropy_sample(m: float, rng: np.random.Generator, size: Optional[int] = None):
    """Draw from the symmetric two-sided geometric distribution.

    The deviation parameter m controls the spread via
    p = 1 - m / (sqrt(1 + m^2) + 1); the sample is the difference of two
    independent geometric variables, giving P(k) = p (1-p)^|k| / (2-p).
    Returns an int for size=None, otherwise an int array.
    """
    if m <= 0:
        raise InvalidDeviation(f"deviation parameter must be positive, got {m}")
    p = 1.0 - m / (math.sqrt(1.0 + m * m) + 1.0)
    g1 = rng.geometric(p, size=size)
    g2 = rng.geometric(p, size=size)
    if size is None:
        return int(g1 - g2)
    return g1 - g2


def _pick_parents(rng: np.random.Generator) -> Tuple[int, int]:
    i, j = rng.integers(0, MU, size=2)
    return int(i), int(j)


def _crossover_mask(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(bool)


def es_run(dp: DiscretizedProblem, budget: int, seed: int, *,
           observer: Optional[Callable] = None) -> RunRecord:
    """(mu, lambda) evolution strategy on the continuous view.

    Discrete uniform recombination of coordinates between two uniformly
    chosen parents, intermediate recombination of the step size, lognormal
    step-size self-adaptation with tau = 1/sqrt(2n), Gaussian mutation.
    Offspring replace the parents each generation (comma selection).
    """
    if budget < LAMBDA:
        raise BudgetTooSmall(f"budget {budget} < lambda {LAMBDA}")
    rng = run_rng(seed)
    n = dp.n
    d = dp.inst.domain
    tau = 1.0 / math.sqrt(2.0 * n)
    limit = min(budget, dp.budget)

    xs = rng.uniform(d.lb, d.ub, size=(MU, n))
    sigmas = rng.uniform(0.0, math.sqrt(d.width), size=MU)
    for x in xs:
        dp.eval_continuous(x)
        if dp.best_delta < TARGET_DELTA:
            return finish_record("es", dp, seed)

    generation = 0
    while dp.best_delta >= TARGET_DELTA and limit - dp.eval_count >= LAMBDA:
        off_x = np.empty((LAMBDA, n))
        off_sigma = np.empty(LAMBDA)
        off_fit = np.empty(LAMBDA)
        for k in range(LAMBDA):
            i, j = _pick_parents(rng)
            mask = _crossover_mask(rng, n)
            x = np.where(mask, xs[i], xs[j])
            sigma = 0.5 * (sigmas[i] + sigmas[j])
            sigma = max(sigma * math.exp(tau * rng.standard_normal()), STEP_FLOOR)
            x = x + sigma * rng.standard_normal(n)
            off_x[k] = x
            off_sigma[k] = sigma
            off_fit[k] = dp.eval_continuous(x)
            if dp.best_delta < TARGET_DELTA:
                return finish_record("es", dp, seed)
        order = np.argsort(off_fit, kind="stable")[:MU]
        xs, sigmas = off_x[order], off_sigma[order]
        generation += 1
        if observer is not None:
            observer(generation=generation, best_fitness=float(off_fit[order[0]]),
                     sigmas=off_sigma[order].copy())
    return finish_record("es", dp, seed)


def intea_run(dp: DiscretizedProblem, budget: int, seed: int, *,
              observer: Optional[Callable] = None) -> RunRecord:
    """(mu, lambda) integer EA with maximum entropy mutation.

    Same skeleton as :func:`es_run`, but on the integer view: the
    self-adapted deviation parameter m plays the role of sigma and each
    coordinate is perturbed by a two-sided geometric step with parameter
    m/n. Out-of-grid offspring evaluate to +inf and are never selected
    over feasible ones.
    """
    if dp.rho is None:
        raise NotDiscretized("integer EA requires a discretized problem")
    if budget < LAMBDA:
        raise BudgetTooSmall(f"budget {budget} < lambda {LAMBDA}")
    rng = run_rng(seed)
    n = dp.n
    d = dp.inst.domain
    tau = 1.0 / math.sqrt(2.0 * n)
    limit = min(budget, dp.budget)
    zlb, zub = dp.integer_bounds()

    zs = rng.integers(zlb[0], zub[0] + 1, size=(MU, n))
    ms = rng.uniform(0.0, math.sqrt(d.width), size=MU)
    for z in zs:
        dp.eval_integer(z)
        if dp.best_delta < TARGET_DELTA:
            return finish_record("intea", dp, seed)

    generation = 0
    while dp.best_delta >= TARGET_DELTA and limit - dp.eval_count >= LAMBDA:
        off_z = np.empty((LAMBDA, n), dtype=np.int64)
        off_m = np.empty(LAMBDA)
        off_fit = np.empty(LAMBDA)
        for k in range(LAMBDA):
            i, j = _pick_parents(rng)
            mask = _crossover_mask(rng, n)
            z = np.where(mask, zs[i], zs[j])
            m = 0.5 * (ms[i] + ms[j])
            m = max(m * math.exp(tau * rng.standard_normal()), STEP_FLOOR)
            z = z + max_entropy_sample(m / n, rng, size=n)
            off_z[k] = z
            off_m[k] = m
            off_fit[k] = dp.eval_integer(z)
            if dp.best_delta < TARGET_DELTA:
                return finish_record("intea", dp, seed)
        order = np.argsort(off_fit, kind="stable")[:MU]
        zs, ms = off_z[order], off_m[order]
        generation += 1
        if observer is not None:
            observer(generation=generation, best_fitness=float(off_fit[order[0]]),
                     deviations=off_m[order].copy())
    return finish_record("intea", dp, seed)


def ga_run(dp: DiscretizedProblem, budget: int, seed: int, *,
           observer: Optional[Callable] = None) -> RunRecord:
    """(mu + lambda) genetic algorithm with uniform resampling mutation.

    Two uniformly chosen parents are recombined coordinate-wise; each
    coordinate is then resampled uniformly over the integer grid with
    probability 1/n. Survivors are the best mu of parents plus offspring.
    """
    if dp.rho is None:
        raise NotDiscretized("GA requires a discretized problem")
    if budget < LAMBDA:
        raise BudgetTooSmall(f"budget {budget} < lambda {LAMBDA}")
    rng = run_rng(seed)
    n = dp.n
    limit = min(budget, dp.budget)
    zlb, zub = dp.integer_bounds()
    p_m = 1.0 / n

    zs = rng.integers(zlb[0], zub[0] + 1, size=(MU, n))
    fits = np.empty(MU)
    for k, z in enumerate(zs):
        fits[k] = dp.eval_integer(z)
        if dp.best_delta < TARGET_DELTA:
            return finish_record("ga", dp, seed)

    generation = 0
    while dp.best_delta >= TARGET_DELTA and limit - dp.eval_count >= LAMBDA:
        off_z = np.empty((LAMBDA, n), dtype=np.int64)
        off_fit = np.empty(LAMBDA)
        for k in range(LAMBDA):
            i, j = _pick_parents(rng)
            mask = _crossover_mask(rng, n)
            z = np.where(mask, zs[i], zs[j])
            resample = rng.random(n) < p_m
            count = int(resample.sum())
            if count:
                z = z.copy()
                z[resample] = rng.integers(zlb[0], zub[0] + 1, size=count)
            off_z[k] = z
            off_fit[k] = dp.eval_integer(z)
            if dp.best_delta < TARGET_DELTA:
                return finish_record("ga", dp, seed)
        pool_z = np.vstack([zs, off_z])
        pool_fit = np.concatenate([fits, off_fit])
        order = np.argsort(pool_fit, kind="stable")[:MU]
        zs, fits = pool_z[order], pool_fit[order]
        generation += 1
        if observer is not None:
            observer(generation=generation, best_fitness=float(fits[0]))
    return finish_record("ga", dp, seed)
