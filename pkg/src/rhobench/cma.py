"""Weighted-recombination CMA-ES and its margin extension for plateaus.

The canonical solver samples N(m, sigma^2 C) with cumulative step-size
adaptation and rank-one plus rank-mu covariance updates. The margin
variant inserts a positive diagonal scaling A into the sampling
distribution, N(m, sigma^2 A C A), and corrects A and m after every
update so that each coordinate keeps at least probability alpha of
sampling outside the plateau currently holding the mean. Without that
floor the step size can shrink below the plateau size and the search
freezes on a plateau; with alpha = 0 no correction is applied and the
algorithm is the canonical CMA-ES.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from .classic import TARGET_DELTA, RunRecord, finish_record, run_rng
from .discretize import DiscretizedProblem, plateau_index
from .errors import (
    BudgetTooSmall,
    DegenerateMarginal,
    MarginRequiresDiscretization,
)

# Marginal standard deviations below this are too degenerate to correct.
_MARGINAL_FLOOR = 1e-300

_SIGMA_FLOOR = 1e-300


@dataclass
class CmaState:
    """Evolving distribution state of one CMA run."""

    mean: np.ndarray
    sigma: float
    C: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    weights: np.ndarray
    generation: int = 0


@dataclass
class MarginState:
    """Diagonal sampling correction A and the margin level alpha."""

    A: np.ndarray
    alpha: float


def default_lambda(n: int) -> int:
    """Default population size 4 + floor(3 ln n)."""
    return 4 + int(math.floor(3.0 * math.log(n)))


def default_alpha(n: int, factor: float = 1.0) -> float:
    """Margin level factor / (lambda * n) for the default population size."""
    return factor / (default_lambda(n) * n)


def _hyperparameters(n: int, lam: int):
    mu = lam // 2
    raw = np.log((lam + 1) / 2.0) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = raw.sum() ** 2 / (raw**2).sum()
    c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) \
        + c_sigma
    c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n)
    c_1 = 2.0 / ((n + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1,
               2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) ** 2 + mu_eff))
    chi_n = math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))
    return mu, weights, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n


def _decompose(C: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigendecomposition C = B diag(D^2) B^T with a positivity guard."""
    C = (C + C.T) / 2.0
    d2, B = np.linalg.eigh(C)
    if d2.min() <= -1e-12 * max(1.0, abs(d2.max())):
        raise FloatingPointError(f"covariance lost positive definiteness: {d2.min()}")
    D = np.sqrt(np.maximum(d2, 1e-40))
    return C, B, D


def _effective_weights(sorted_fits: np.ndarray, weights: np.ndarray,
                       n_feasible: int) -> np.ndarray:
    """Recombination weights over ranked candidates, ties sharing weight.

    Candidates with equal (finite) fitness are indistinguishable to
    selection, so they share the average of the weights their ranks span;
    on plateau landscapes this keeps flat generations from pulling the
    mean in an arbitrary sampling-order direction. Infeasible candidates
    get no weight; when fewer than mu are feasible, the feasible prefix is
    renormalized. Returns weights for the first `len(result)` ranked
    candidates (zeros allowed), summing to 1.
    """
    mu = weights.size
    if n_feasible >= mu:
        full = np.zeros(n_feasible)
        full[:mu] = weights
    else:
        full = weights[:n_feasible] / weights[:n_feasible].sum()
    i = 0
    while i < full.size:
        j = i
        while j + 1 < full.size and sorted_fits[j + 1] == sorted_fits[i]:
            j += 1
        if j > i:
            full[i:j + 1] = full[i:j + 1].mean()
        i = j + 1
    return full


def escape_probability(mean_k: float, scale_k: float, rho: float) -> float:
    """Probability that a marginal sample leaves the plateau holding mean_k."""
    j = float(plateau_index(mean_k, rho))
    l_low = j * rho
    l_up = (j + 1.0) * rho
    return float(ndtr((l_low - mean_k) / scale_k)
                 + 1.0 - ndtr((l_up - mean_k) / scale_k))


def margin_correction(state: CmaState, margin: MarginState,
                      dp: DiscretizedProblem) -> Tuple[CmaState, MarginState]:
    """Lower-bound each coordinate's probability of leaving its plateau.

    For every coordinate the marginal sampling distribution is the normal
    with mean state.mean[k] and standard deviation sigma * A[k] *
    sqrt(C[k,k]). Two cases:

    * mean inside the integer grid: the probabilities of sampling below
      the plateau's lower edge and above its upper edge are both floored
      at alpha/2, the remaining mass is renormalized, and mean[k] and A[k]
      are refit so the corrected marginal realizes those tail
      probabilities exactly.
    * mean drifted beyond the outermost in-grid plateau edge: mean[k] is
      pulled toward the nearest grid edge until the probability of
      crossing it back is alpha.

    Returns the same (state, margin) objects, modified in place. With
    alpha = 0 this is the identity.
    """
    alpha = margin.alpha
    if alpha == 0.0:
        return state, margin
    if dp.rho is None:
        raise MarginRequiresDiscretization("margin needs a plateau size")
    rho = dp.rho
    zlb, zub = dp.integer_bounds()
    half = alpha / 2.0
    c_diag = np.diag(state.C)
    for k in range(dp.n):
        root_c = math.sqrt(c_diag[k])
        s = state.sigma * margin.A[k] * root_c
        if s < _MARGINAL_FLOOR:
            raise DegenerateMarginal(
                f"marginal deviation {s} underflowed in coordinate {k}"
            )
        m_k = state.mean[k]
        j = int(plateau_index(m_k, rho))
        if j < zlb[k] or j > zub[k]:
            # Outside the admissible grid: keep alpha mass across the
            # nearest in-grid edge, pulling the mean toward it if needed.
            ell = zlb[k] * rho if j < zlb[k] else (zub[k] + 1.0) * rho
            p_cross = float(ndtr(-abs(m_k - ell) / s))
            if p_cross < alpha:
                dist = s * ndtri(1.0 - alpha)
                state.mean[k] = ell + math.copysign(dist, m_k - ell)
            continue
        l_low = j * rho
        l_up = (j + 1.0) * rho
        low = float(ndtr((l_low - m_k) / s))
        up = float(ndtr((m_k - l_up) / s))
        if low >= half and up >= half:
            continue
        mid = 1.0 - low - up
        low2 = max(low, half)
        up2 = max(up, half)
        deficit = 1.0 - low2 - up2 - mid
        denom = low2 + up2 + mid - alpha
        low3 = low2 + deficit * (low2 - half) / denom
        up3 = up2 + deficit * (up2 - half) / denom
        low3 = min(max(low3, 1e-12), 0.5 - 1e-12)
        up3 = min(max(up3, 1e-12), 0.5 - 1e-12)
        chi_low = ndtri(1.0 - low3)
        chi_up = ndtri(1.0 - up3)
        state.mean[k] = (l_low * chi_up + l_up * chi_low) / (chi_low + chi_up)
        margin.A[k] = (l_up - l_low) / ((chi_low + chi_up) * state.sigma * root_c)
    return state, margin


def _check_margin(state: CmaState, margin: MarginState, dp: DiscretizedProblem):
    c_diag = np.diag(state.C)
    for k in range(dp.n):
        s = state.sigma * margin.A[k] * math.sqrt(c_diag[k])
        p = escape_probability(state.mean[k], s, dp.rho)
        assert p >= margin.alpha - 1e-9, (
            f"escape probability {p} below margin {margin.alpha} in coordinate {k}"
        )


def cma_run(dp: DiscretizedProblem, budget: int, seed: int, alpha: float = 0.0, *,
            observer: Optional[Callable] = None) -> RunRecord:
    """Run CMA-ES (alpha = 0) or CMA-ES with margin (alpha > 0).

    Candidates outside the box evaluate to +inf and rank last (ties in
    sampling order). When fewer than mu candidates are feasible, the
    update recombines only the feasible prefix with renormalized weights.
    Stops at budget exhaustion or once delta drops below the target.
    """
    n = dp.n
    lam = default_lambda(n)
    if budget < lam:
        raise BudgetTooSmall(f"budget {budget} < lambda {lam}")
    if alpha < 0.0 or alpha >= 0.5:
        raise ValueError(f"alpha must be in [0, 0.5), got {alpha}")
    if alpha > 0.0 and dp.rho is None:
        raise MarginRequiresDiscretization(
            "a positive margin requires a discretized problem"
        )
    algorithm = "cmaes" if alpha == 0.0 else "cmaeswm"
    rng = run_rng(seed)
    d = dp.inst.domain
    mu, weights, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n = \
        _hyperparameters(n, lam)
    limit = min(budget, dp.budget)

    state = CmaState(
        mean=rng.uniform(d.lb, d.ub, size=n),
        sigma=0.3 * d.width,
        C=np.eye(n),
        p_sigma=np.zeros(n),
        p_c=np.zeros(n),
        weights=weights,
    )
    margin = MarginState(A=np.ones(n), alpha=alpha)

    while dp.best_delta >= TARGET_DELTA and limit - dp.eval_count >= lam:
        state.C, B, D = _decompose(state.C)
        ys = np.empty((lam, n))
        fits = np.empty(lam)
        hit = False
        for k in range(lam):
            y = B @ (D * rng.standard_normal(n))
            ys[k] = y
            x = state.mean + state.sigma * margin.A * y
            fits[k] = dp.eval_continuous(x)
            if dp.best_delta < TARGET_DELTA:
                hit = True
                break
        if hit:
            break
        order = np.argsort(fits, kind="stable")
        n_feasible = int(np.isfinite(fits).sum())
        if n_feasible == 0:
            # no information: hold the mean, let the paths decay and the
            # step contract until proposals return to the box
            y_sel = np.zeros((0, n))
            w = np.zeros(0)
            y_w = np.zeros(n)
        else:
            w = _effective_weights(fits[order], weights, n_feasible)
            sel = order[: w.size]
            y_sel = ys[sel]
            y_w = w @ y_sel
            state.mean = state.mean + state.sigma * y_w
        c_inv_sqrt = B @ ((1.0 / D)[:, None] * B.T)
        state.p_sigma = (1.0 - c_sigma) * state.p_sigma \
            + math.sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (c_inv_sqrt @ y_w)
        norm_ps = float(np.linalg.norm(state.p_sigma))
        state.sigma = max(
            state.sigma * math.exp((c_sigma / d_sigma) * (norm_ps / chi_n - 1.0)),
            _SIGMA_FLOOR,
        )
        h_sigma = norm_ps / math.sqrt(
            1.0 - (1.0 - c_sigma) ** (2 * (state.generation + 1))
        ) < (1.4 + 2.0 / (n + 1.0)) * chi_n
        state.p_c = (1.0 - c_c) * state.p_c
        if h_sigma:
            state.p_c = state.p_c + math.sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w
        rank_mu = (w[:, None, None] * (y_sel[:, :, None] * y_sel[:, None, :])).sum(0)
        state.C = (
            (1.0 - c_1 - c_mu * w.sum()) * state.C
            + c_1 * (np.outer(state.p_c, state.p_c)
                     + (0.0 if h_sigma else 1.0) * c_c * (2.0 - c_c) * state.C)
            + c_mu * rank_mu
        )
        state.C = (state.C + state.C.T) / 2.0
        state.generation += 1
        if alpha > 0.0:
            margin_correction(state, margin, dp)
            if __debug__:
                _check_margin(state, margin, dp)
        if observer is not None:
            observer(state=state, margin=margin,
                     best_fitness=float(fits[order[0]]))
    return finish_record(algorithm, dp, seed)
