import math
import statistics

import numpy as np
import pytest
from scipy.special import ndtr

import rhobench as rb
from rhobench.cma import (
    CmaState,
    MarginState,
    default_alpha,
    default_lambda,
    escape_probability,
    margin_correction,
)
from rhobench.discretize import DiscretizedProblem, plateau_index
from rhobench.errors import (
    BudgetTooSmall,
    DegenerateMarginal,
    MarginRequiresDiscretization,
)


def _dp(fid=1, n=5, instance=0, rho=None, budget=10_000):
    return DiscretizedProblem(rb.make_instance(fid, n, instance), rho, budget)


def test_default_lambda_and_alpha():
    assert default_lambda(10) == 10
    assert default_alpha(10) == pytest.approx(0.01)
    assert default_alpha(10, 2.0) == pytest.approx(0.02)
    assert default_lambda(5) == 8


def test_cma_solves_continuous_sphere():
    hits = []
    for seed in range(20):
        rec = rb.cma_run(_dp(instance=seed % 5), 10_000, seed)
        hits.append(rec.hit_target_at)
    assert all(h is not None for h in hits)
    assert statistics.median(hits) <= 2000


def test_cma_deterministic():
    a = rb.cma_run(_dp(), 10_000, 99)
    b = rb.cma_run(_dp(), 10_000, 99)
    assert a.trajectory == b.trajectory


def test_cma_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        rb.cma_run(_dp(budget=4), 4, 0)


def test_margin_requires_discretization():
    with pytest.raises(MarginRequiresDiscretization):
        rb.cma_run(_dp(rho=None), 10_000, 0, 0.01)


def test_alpha_validation():
    with pytest.raises(ValueError):
        rb.cma_run(_dp(rho=0.5), 10_000, 0, 0.6)
    with pytest.raises(ValueError):
        rb.cma_run(_dp(rho=0.5), 10_000, 0, -0.1)


def test_alpha_zero_identical_to_canonical_on_discretized():
    a = rb.cma_run(_dp(rho=0.1), 5000, 21, 0.0)
    dp = _dp(rho=0.1)
    b = rb.cma_run(dp, 5000, 21)
    assert a.trajectory == b.trajectory


def test_csa_shrinks_sigma_on_continuous_sphere():
    # converging runs contract the step size by 10x or more after warmup
    for seed in range(5):
        log = []
        dp = _dp(instance=seed)
        rb.cma_run(dp, 10_000, seed,
                   observer=lambda **kw: log.append(
                       (dp.eval_count, kw["state"].sigma)))
        early = [s for e, s in log if e >= 200][0]
        assert log[-1][1] < early / 10


def _margin_setup(n=4, rho=0.5, sigma=0.3, mean=None, a=None):
    dp = _dp(fid=1, n=n, rho=rho)
    state = CmaState(
        mean=np.array(mean if mean is not None else dp.inst.x_opt + 0.1),
        sigma=sigma,
        C=np.eye(n),
        p_sigma=np.zeros(n),
        p_c=np.zeros(n),
        weights=np.ones(2) / 2,
    )
    margin = MarginState(A=np.ones(n) if a is None else np.array(a), alpha=0.01)
    return dp, state, margin


def test_margin_wide_marginal_untouched():
    # escape probability already far above alpha: exact no-op
    dp, state, margin = _margin_setup(sigma=2.0)
    mean_before = state.mean.copy()
    a_before = margin.A.copy()
    margin_correction(state, margin, dp)
    assert np.array_equal(state.mean, mean_before)
    assert np.array_equal(margin.A, a_before)


def test_margin_lower_bounds_escape_probability():
    # collapse the marginal to a 1e-6-ish escape and require alpha afterwards
    dp, state, margin = _margin_setup(sigma=0.05)
    state.mean[:] = dp.inst.x_opt + 0.25  # mid-plateau-ish
    margin_correction(state, margin, dp)
    for k in range(dp.n):
        s = state.sigma * margin.A[k] * math.sqrt(state.C[k, k])
        p = escape_probability(state.mean[k], s, dp.rho)
        assert p >= margin.alpha - 1e-9


def test_margin_alpha_zero_identity():
    dp, state, margin = _margin_setup()
    margin.alpha = 0.0
    mean_before = state.mean.copy()
    out_state, out_margin = margin_correction(state, margin, dp)
    assert out_state is state and out_margin is margin
    assert np.array_equal(state.mean, mean_before)


def test_margin_per_side_tails_after_correction():
    dp, state, margin = _margin_setup(sigma=1e-3)
    margin_correction(state, margin, dp)
    rho = dp.rho
    for k in range(dp.n):
        s = state.sigma * margin.A[k] * math.sqrt(state.C[k, k])
        j = float(plateau_index(state.mean[k], rho))
        low = ndtr((j * rho - state.mean[k]) / s)
        up = ndtr((state.mean[k] - (j + 1) * rho) / s)
        assert low >= margin.alpha / 2 - 1e-12
        assert up >= margin.alpha / 2 - 1e-12


def test_margin_mean_outside_grid_pulled_back():
    dp, state, margin = _margin_setup(sigma=0.01)
    state.mean[0] = 7.9  # beyond the admissible grid
    margin_correction(state, margin, dp)
    zlb, zub = dp.integer_bounds()
    ell = (zub[0] + 1.0) * dp.rho
    s = state.sigma * margin.A[0] * math.sqrt(state.C[0, 0])
    p_cross = ndtr(-(abs(state.mean[0] - ell)) / s)
    assert p_cross == pytest.approx(margin.alpha, rel=1e-6)


def test_margin_degenerate_marginal():
    dp, state, margin = _margin_setup(sigma=1e-305)
    with pytest.raises(DegenerateMarginal):
        margin_correction(state, margin, dp)


def test_stagnation_mechanism_reproducible():
    # canonical runs on the quantized sphere can freeze: step collapses
    # below a tenth of the plateau while the target is still unmet
    observed = False
    for seed in range(40):
        dp = _dp(fid=1, n=10, instance=seed % 5, rho=0.1, budget=20_000)
        floors = [math.inf]

        def obs(state=None, margin=None, best_fitness=None):
            step = state.sigma * math.sqrt(np.diag(state.C).max())
            floors[0] = min(floors[0], step)

        rec = rb.cma_run(dp, 20_000, 500_000 + seed, observer=obs)
        if rec.hit_target_at is None and floors[0] < 0.1 / 10:
            observed = True
            break
    assert observed


def test_margin_run_solves_quantized_sphere():
    for seed in range(6):
        dp = _dp(fid=1, n=10, instance=seed % 5, rho=0.01, budget=20_000)
        rec = rb.cma_run(dp, 20_000, 7_000 + seed, default_alpha(10))
        assert rec.hit_target_at is not None


def test_margin_rescues_stagnating_seed():
    # seed found by scanning: canonical freezes one plateau off the optimum
    dp_c = _dp(fid=1, n=10, instance=0, rho=0.1, budget=30_000)
    rec_c = rb.cma_run(dp_c, 30_000, 500_035)
    dp_m = _dp(fid=1, n=10, instance=0, rho=0.1, budget=30_000)
    rec_m = rb.cma_run(dp_m, 30_000, 500_035, default_alpha(10))
    assert rec_c.hit_target_at is None
    assert rec_c.final_delta == pytest.approx(0.1**2, rel=1e-6)
    assert rec_m.hit_target_at is not None


def test_covariance_stays_positive_definite():
    eigs = []
    rb.cma_run(_dp(fid=9, n=5, rho=0.5, budget=3000), 3000, 12,
               observer=lambda **kw: eigs.append(
                   np.linalg.eigvalsh(kw["state"].C).min()))
    assert all(e > 0 for e in eigs)


def test_weights_properties():
    from rhobench.cma import _hyperparameters
    for n in (2, 5, 10, 20):
        lam = default_lambda(n)
        mu, weights, mu_eff, *_ = _hyperparameters(n, lam)
        assert mu == lam // 2
        assert np.all(weights > 0)
        assert np.all(np.diff(weights) <= 0)
        assert weights.sum() == pytest.approx(1.0)
        assert 1.0 <= mu_eff <= mu


def test_margin_correction_idempotent():
    dp, state, margin = _margin_setup(sigma=0.02)
    margin_correction(state, margin, dp)
    mean_once = state.mean.copy()
    a_once = margin.A.copy()
    margin_correction(state, margin, dp)
    assert np.allclose(state.mean, mean_once, rtol=0, atol=1e-12)
    assert np.allclose(margin.A, a_once, rtol=1e-12, atol=0)


def test_margin_contract_on_random_states():
    rng = np.random.default_rng(31415)
    dp = _dp(fid=1, n=6, rho=0.25)
    for _ in range(200):
        state = CmaState(
            mean=rng.uniform(-6.0, 6.0, 6),
            sigma=float(10.0 ** rng.uniform(-6, 0.5)),
            C=np.diag(10.0 ** rng.uniform(-2, 2, 6)),
            p_sigma=np.zeros(6),
            p_c=np.zeros(6),
            weights=np.ones(3) / 3,
        )
        margin = MarginState(A=10.0 ** rng.uniform(-1, 1, 6), alpha=0.02)
        margin_correction(state, margin, dp)
        for k in range(6):
            s = state.sigma * margin.A[k] * math.sqrt(state.C[k, k])
            p = escape_probability(state.mean[k], s, dp.rho)
            assert p >= margin.alpha - 1e-9
