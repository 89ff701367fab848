import math

import numpy as np
import pytest

import rhobench as rb
from rhobench.discretize import DiscretizedProblem, plateau_index, snap_to_plateau
from rhobench.errors import (
    BudgetExhausted,
    DimensionMismatch,
    InvalidPlateauSize,
    NotDiscretized,
    UnsupportedDimension,
)

RHOS = [0.001, 0.01, 0.1, 0.5, 1.0, 2.0]


def make_dp(fid=1, n=5, instance=0, rho=0.5, budget=10**6):
    return DiscretizedProblem(rb.make_instance(fid, n, instance), rho, budget)


def test_snap_examples():
    assert snap_to_plateau(np.array([1.3]), 0.5) == pytest.approx([1.0])
    assert snap_to_plateau(np.array([-1.3]), 0.5) == pytest.approx([-1.5])
    assert snap_to_plateau(np.array([2.0]), 0.5)[0] == 2.0


def test_snap_edge_guard():
    # 0.3 / 0.1 is 2.999...96 in floats; the guard keeps 0.3 on its own edge
    snapped = snap_to_plateau(np.array([0.3]), 0.1)[0]
    assert snapped == pytest.approx(0.3, abs=1e-15)
    assert plateau_index(np.array([0.3]), 0.1)[0] == 3


def test_snap_left_edge_floor():
    rng = np.random.default_rng(5)
    for rho in RHOS:
        x = rng.uniform(-5, 5, size=1000)
        s = snap_to_plateau(x, rho)
        assert np.all(s <= x + 1e-12 * rho)
        assert np.all(x - s < rho * (1 + 1e-9))


def test_invalid_plateau_size():
    with pytest.raises(InvalidPlateauSize):
        snap_to_plateau(np.array([1.0]), 0.0)
    with pytest.raises(InvalidPlateauSize):
        make_dp(rho=-1.0)
    with pytest.raises(InvalidPlateauSize):
        make_dp(rho=11.0)


def test_translation_in_range():
    for rho in RHOS:
        for fid in (1, 2, 5, 8, 9):
            dp = make_dp(fid=fid, rho=rho)
            assert np.all(dp.t >= 0.0)
            assert np.all(dp.t < rho)


def test_shift_and_clamp_upper_branch():
    dp = make_dp(rho=2.0)
    shifted = dp.shift_and_clamp(np.array([4.0] * 5) + (1.7 - dp.t))
    # force the 5.7 case by hand: 4.0 + 1.7 clamps to 5.0
    assert np.all(dp.shift_and_clamp(np.full(5, 5.7) - dp.t) == 5.0)
    assert shifted.shape == (5,)


def test_optimum_fixed_point():
    for fid in (1, 2, 5, 8, 9):
        for rho in RHOS:
            dp = make_dp(fid=fid, rho=rho)
            x_opt = dp.inst.x_opt
            image = dp.transform(x_opt)
            assert np.array_equal(image, x_opt)


def test_optimum_preservation_exact():
    for fid in (1, 2, 5, 8, 9):
        for rho in RHOS:
            dp = make_dp(fid=fid, rho=rho, budget=10)
            value = dp.eval_continuous(dp.inst.x_opt)
            assert value - dp.inst.f_opt == 0.0


def test_infeasible_counts_budget_and_returns_inf():
    dp = make_dp(rho=0.5, budget=3)
    assert dp.eval_continuous(np.full(5, 5.1)) == math.inf
    assert dp.eval_count == 1
    assert dp.best_delta == math.inf
    assert dp.trajectory == []


def test_budget_exhausted():
    dp = make_dp(rho=None, budget=1)
    dp.eval_continuous(np.zeros(5))
    with pytest.raises(BudgetExhausted):
        dp.eval_continuous(np.zeros(5))


def test_dimension_mismatch():
    dp = make_dp()
    with pytest.raises(DimensionMismatch):
        dp.eval_continuous(np.zeros(4))


def test_continuous_passthrough_without_rho():
    dp = make_dp(rho=None)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.uniform(-5, 5, 5)
        assert dp.eval_continuous(x) == dp.inst.evaluate_raw(x)


def test_whole_plateau_maps_to_left_edge_value():
    # flat inside one plateau: same value anywhere in the box
    dp = make_dp(fid=1, rho=2.0)
    rng = np.random.default_rng(2)
    base = rng.uniform(-4, 2, 5)
    anchor = dp.eval_continuous(snap_to_plateau(base, 2.0) + 1e-9)
    for _ in range(20):
        x = snap_to_plateau(base, 2.0) + rng.uniform(0, 2.0 - 1e-9, 5)
        assert dp.eval_continuous(x) == anchor


def test_integer_bounds_examples():
    assert rb.make_instance(1, 2, 0).domain.width == 10.0
    dp = make_dp(rho=0.5)
    zlb, zub = dp.integer_bounds()
    assert zlb[0] == -10 and zub[0] == 10
    dp = make_dp(rho=2.0)
    zlb, zub = dp.integer_bounds()
    assert zlb[0] == -2 and zub[0] == 2
    dp = make_dp(rho=1.0)
    zlb, zub = dp.integer_bounds()
    assert zlb[0] == -5 and zub[0] == 5
    dp = make_dp(rho=0.001)
    zlb, zub = dp.integer_bounds()
    assert zlb[0] == -5000 and zub[0] == 5000


def test_integer_bounds_requires_rho():
    dp = make_dp(rho=None)
    with pytest.raises(NotDiscretized):
        dp.integer_bounds()
    with pytest.raises(NotDiscretized):
        dp.eval_integer(np.zeros(5, dtype=int))


def test_integer_view_boundary_and_overflow():
    dp = make_dp(rho=0.5)
    z = np.full(5, -10)
    value = dp.eval_integer(z)
    assert value == dp.inst.evaluate_raw(dp.shift_and_clamp(np.full(5, -5.0)))
    assert dp.eval_integer(np.full(5, 11)) == math.inf


def test_views_agree():
    rng = np.random.default_rng(42)
    for rho in RHOS:
        dp = make_dp(fid=2, rho=rho)
        zlb, zub = dp.integer_bounds()
        for _ in range(50):
            x = rng.uniform(-5, 5, 5)
            z = np.rint(snap_to_plateau(x, rho) / rho).astype(int)
            if np.all(z >= zlb) and np.all(z <= zub):
                assert dp.eval_continuous(x) == dp.eval_integer(z)


def test_boundary_cell_outside_integer_grid():
    # at rho=2 the cell [-5,-4) snaps to an edge below the grid: the integer
    # view cannot represent it while the continuous view clamps and evaluates
    dp = make_dp(fid=1, rho=2.0)
    x = np.full(5, -4.5)
    z = np.rint(snap_to_plateau(x, 2.0) / 2.0).astype(int)
    assert z[0] == -3
    assert dp.eval_integer(z) == math.inf
    assert math.isfinite(dp.eval_continuous(x))


def test_idempotent_on_interior():
    rng = np.random.default_rng(9)
    for rho in RHOS:
        dp = make_dp(fid=8, rho=rho)
        x = rng.uniform(-4.5, 4.5, size=(200, 5))
        once = dp.transform(x)
        interior = np.all((once > -5) & (once < 5), axis=1)
        twice = dp.transform(once[interior])
        assert np.array_equal(twice, once[interior])


def test_trajectory_monotone():
    dp = make_dp(fid=1, rho=0.1, budget=2000)
    rng = np.random.default_rng(11)
    for _ in range(2000):
        dp.eval_continuous(rng.uniform(-5, 5, 5))
    evs = [e for e, _ in dp.trajectory]
    deltas = [d for _, d in dp.trajectory]
    assert evs == sorted(evs)
    assert all(a > b for a, b in zip(deltas, deltas[1:]))
    assert dp.eval_count == 2000


def test_distinct_cells_per_axis():
    # the integer grid exposes zub - zlb + 1 representable cells per axis;
    # interior ones (no clamp) map to distinct evaluation points
    dp = make_dp(fid=1, n=1, rho=1.0, budget=10**6)
    zlb, zub = dp.integer_bounds()
    zs = np.arange(zlb[0], zub[0] + 1)
    assert len(zs) == zub[0] - zlb[0] + 1
    points = [float(dp.shift_and_clamp(np.array([z * 1.0]))[0]) for z in zs]
    interior = [p for z, p in zip(zs, points) if -5.0 < z * 1.0 + dp.t[0] < 5.0]
    assert len(set(interior)) == len(interior)
    # values along one axis of a non-symmetric function are distinct too
    dp8 = make_dp(fid=8, n=2, rho=1.0, budget=10**6)
    zlb8, zub8 = dp8.integer_bounds()
    vals = {dp8.eval_integer(np.array([z, 0])) for z in range(zlb8[0], zub8[0] + 1)}
    assert len(vals) == zub8[0] - zlb8[0] + 1


def test_landscape_grid_1d_plateau_count():
    dp = make_dp(fid=1, n=1, rho=2.0)
    grid = dp.landscape_grid(101)
    assert grid.shape == (101, 2)
    distinct = len(set(grid[:, 1]))
    assert distinct <= 7  # 5 interior cells + clamped edge cells
    assert dp.eval_count == 0  # off the meter


def test_landscape_grid_1d_continuous_convex():
    dp = make_dp(fid=1, n=1, rho=None)
    values = dp.landscape_grid(101)[:, 1]
    second = np.diff(values, 2)
    assert np.all(second > 0)


def test_landscape_grid_2d_matches_pointwise():
    dp = make_dp(fid=8, n=2, rho=0.5)
    grid = dp.landscape_grid(21)
    assert grid.shape == (441, 3)
    for row in grid[::37]:
        x = row[:2]
        assert dp.inst.evaluate_raw(dp.transform(x)) == row[2]


def test_landscape_grid_rejects_3d():
    dp = make_dp(fid=1, n=3, rho=1.0)
    with pytest.raises(UnsupportedDimension):
        dp.landscape_grid(11)
