import math

import numpy as np
import pytest

from maxstable_pv import pv_stats
from maxstable_pv.path_sim import (
    Grid,
    GridPath,
    MaxStablePath,
    SpectralAtom,
    TruncationDiagnostics,
    VolatilitySpec,
    replicate_rng,
    sample_brown_resnick,
    sample_brownian,
    sample_max_two_bm,
)

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _linear_path(grid: Grid, c: float) -> GridPath:
    return GridPath(grid, c * grid.times)


def _two_atom_path(grid: Grid, z1: np.ndarray, z2: np.ndarray,
                   vol=None, margin=math.inf) -> MaxStablePath:
    vol = vol or VolatilitySpec.constant(1.0)
    drift = vol.cumulative_drift(grid)
    atoms = [SpectralAtom(0.0, GridPath(grid, z - drift), GridPath(grid, z))
             for z in (z1, z2)]
    zmat = np.stack([z1, z2])
    return MaxStablePath(
        log_eta=GridPath(grid, zmat.max(axis=0) - drift),
        atoms=atoms,
        argmax_index=zmat.argmax(axis=0).astype(np.int64),
        truncation_diag=TruncationDiagnostics(2, math.inf, 1e-3),
        vol=vol,
        retain_margin=margin,
    )


# ---------------------------------------------------------------------------
# power variation
# ---------------------------------------------------------------------------

def test_power_variation_linear_path():
    grid = Grid(100)
    b = pv_stats.power_variation(_linear_path(grid, 1.0), 2, 1.0)
    assert b == pytest.approx(0.0099, abs=1e-15)


def test_power_variation_zero_path():
    grid = Grid(64)
    assert pv_stats.power_variation(GridPath(grid, np.zeros(65)), 3, 1.0) == 0.0


def test_power_variation_homogeneity_and_shift():
    grid = Grid(128)
    path = sample_brownian(grid, replicate_rng(1, 0))
    c = -2.5
    scaled = GridPath(grid, c * path.values)
    assert pv_stats.power_variation(scaled, 3, 0.7) == pytest.approx(
        abs(c) ** 3 * pv_stats.power_variation(path, 3, 0.7), rel=1e-14)
    # dyadic lattice values so that adding the constant is exact in binary
    lattice = GridPath(grid, np.round(path.values * 2 ** 20) / 2 ** 20)
    shifted = GridPath(grid, lattice.values + 16.0)
    assert pv_stats.power_variation(shifted, 2, 1.0) == \
        pv_stats.power_variation(lattice, 2, 1.0)


def test_power_variation_early_times_zero():
    grid = Grid(64)
    path = sample_brownian(grid, replicate_rng(1, 1))
    assert pv_stats.power_variation(path, 2, 0.0) == 0.0
    assert pv_stats.power_variation(path, 2, 1.0 / 64.0) == 0.0
    with pytest.raises(ValueError):
        pv_stats.power_variation(path, 0, 1.0)


def test_pv_series_matches_pointwise_and_monotone():
    grid = Grid(64)
    path = sample_brownian(grid, replicate_rng(1, 2))
    series = pv_stats.pv_series(path, 2)
    assert series.values[0] == 0.0 and series.values[1] == 0.0
    assert np.all(np.diff(series.values) >= 0.0)
    for k in (2, 17, 64):
        assert series.values[k] == pytest.approx(
            pv_stats.power_variation(path, 2, k / 64.0), abs=1e-15)


# ---------------------------------------------------------------------------
# local time estimators
# ---------------------------------------------------------------------------

def test_kernel_zero_off_level():
    grid = Grid(256)
    w = sample_brownian(grid, replicate_rng(2, 0))
    lifted = GridPath(grid, 5.0 + np.abs(w.values))
    assert pv_stats.local_time_kernel(lifted, 1.0, 1.0) == 0.0


def test_tanaka_zero_for_monotone_positive_path():
    grid = Grid(32)
    path = GridPath(grid, 0.5 + grid.times ** 2)
    assert pv_stats.local_time_tanaka(path, 1.0) == 0.0


def test_tanaka_reflection_symmetry():
    grid = Grid(512)
    for r in range(100):
        w = sample_brownian(grid, replicate_rng(3, r))
        path = GridPath(grid, w.values + 0.3)     # avoid exact zeros
        flipped = GridPath(grid, -path.values)
        assert pv_stats.local_time_tanaka(path, 1.0) == pytest.approx(
            pv_stats.local_time_tanaka(flipped, 1.0), abs=1e-12)


def test_local_time_estimators_hit_known_mean():
    # X = W2 - W1 has E L^0_1 = E|X_1| = 2/sqrt(pi)
    grid = Grid(4096)
    reps = 2000
    kern = np.empty(reps)
    tank = np.empty(reps)
    for r in range(reps):
        _, diff = sample_max_two_bm(grid, replicate_rng(5, r))
        kern[r] = pv_stats.local_time_kernel(diff, 1.0, 1.0)
        tank[r] = pv_stats.local_time_tanaka(diff, 1.0)
    for est in (kern, tank):
        se = est.std(ddof=1) / math.sqrt(reps)
        assert abs(est.mean() - TWO_OVER_SQRT_PI) < 4 * se


def test_local_time_series_properties():
    grid = Grid(1024)
    _, diff = sample_max_two_bm(grid, replicate_rng(5, 12345))
    for series in (pv_stats.local_time_kernel_series(diff, 1.0),
                   pv_stats.local_time_tanaka_series(diff)):
        assert series.values[0] == 0.0
        assert np.all(np.diff(series.values) >= -1e-15)
        assert np.all(series.values >= -1e-15)
    ks = pv_stats.local_time_kernel_series(diff, 1.0)
    assert ks.values[-1] == pytest.approx(
        pv_stats.local_time_kernel(diff, 1.0, 1.0), abs=1e-15)


# ---------------------------------------------------------------------------
# bias functional
# ---------------------------------------------------------------------------

def test_bias_functional_needs_two_atoms():
    grid = Grid(64)
    path = _two_atom_path(grid, np.zeros(65), np.ones(65))
    lone = MaxStablePath(path.log_eta, path.atoms[:1], path.argmax_index,
                         path.truncation_diag, path.vol, path.retain_margin)
    with pytest.raises(ValueError):
        pv_stats.clt_bias_functional(lone, 2, 1.0, 1.0)


def test_bias_functional_zero_when_one_atom_dominates():
    grid = Grid(64)
    z1 = np.zeros(65)
    z2 = z1 - 10.0        # separated by far more than h/sqrt(n)
    path = _two_atom_path(grid, z1, z2)
    assert pv_stats.clt_bias_functional(path, 2, 1.0, 1.0) == 0.0


def test_bias_functional_reduces_to_kernel_local_time():
    grid = Grid(1024)
    mx, diff = sample_max_two_bm(grid, replicate_rng(6, 0))
    w1 = mx.values - np.maximum(diff.values, 0.0)
    path = _two_atom_path(grid, w1, w1 + diff.values)
    lam1 = pv_stats.lambda_phi_unit(2)
    expected = 0.5 * lam1 * pv_stats.local_time_kernel(diff, 1.0, 1.0)
    got = pv_stats.clt_bias_functional(path, 2, 1.0, 1.0, lam1)
    assert got == pytest.approx(expected, abs=1e-12)


def test_bias_functional_const_route_matches_general():
    grid = Grid(512)
    vol = VolatilitySpec.constant(1.7)
    ms = sample_brown_resnick(vol, grid, replicate_rng(6, 1), 1e-3)
    for t in (0.5, 1.0):
        general = pv_stats.clt_bias_functional(ms, 2, t, 1.0)
        const = pv_stats.clt_bias_functional_const(ms, 2, t, 1.0)
        assert abs(general - const) < 1e-12


def test_bias_functional_interval_additivity():
    grid = Grid(512)
    vol = VolatilitySpec.constant(1.0)
    ms = sample_brown_resnick(vol, grid, replicate_rng(6, 2), 1e-3)
    f = lambda t: pv_stats.clt_bias_functional(ms, 2, t, 1.0)
    quarters = f(0.25) + (f(0.5) - f(0.25)) + (f(1.0) - f(0.5))
    assert quarters == pytest.approx(f(1.0), abs=1e-12)


def test_bias_functional_halfwidth_guard():
    grid = Grid(64)
    path = _two_atom_path(grid, np.zeros(65), np.ones(65), margin=0.05)
    with pytest.raises(ValueError):
        pv_stats.clt_bias_functional(path, 2, 1.0, 1.0)


# ---------------------------------------------------------------------------
# volatility recovery
# ---------------------------------------------------------------------------

def test_estimate_h_window_validation():
    grid = Grid(256)
    path = sample_brownian(grid, replicate_rng(8, 0))
    for bad in (8, 128, 10_000):
        with pytest.raises(ValueError):
            pv_stats.estimate_h(path, 2, bad)


def test_estimate_h_on_brownian_path():
    # B(2, W)^n_t -> t means the implied volatility is 1
    medians = []
    for r in range(20):
        grid = Grid(2 ** 14)
        w = sample_brownian(grid, replicate_rng(8, 1 + r))
        h_hat = pv_stats.estimate_h(w, 2, 512)
        sl = pv_stats.full_window_slice(grid.n, 512)
        medians.append(float(np.median(h_hat.values[sl])))
    assert abs(np.median(medians) - 1.0) < 0.05


def test_estimate_h_recovers_constant_sigma():
    medians = []
    vol = VolatilitySpec.constant(1.5)
    for r in range(20):
        grid = Grid(2 ** 14)
        ms = sample_brown_resnick(vol, grid, replicate_rng(8, 100 + r), 1e-3)
        h_hat = pv_stats.estimate_h(ms.log_eta, 2, 512)
        sl = pv_stats.full_window_slice(grid.n, 512)
        medians.append(float(np.median(h_hat.values[sl])))
    assert abs(np.median(medians) - 1.5) < 0.075


def test_estimate_h_recovers_linear_profile_coarse():
    vol = VolatilitySpec.power_law(1.0, 1.0, 1.0)
    maes = []
    for r in range(5):
        grid = Grid(2 ** 14)
        ms = sample_brown_resnick(vol, grid, replicate_rng(8, 200 + r), 1e-3)
        h_hat = pv_stats.estimate_h(ms.log_eta, 2, 512)
        sl = pv_stats.full_window_slice(grid.n, 512)
        truth = vol.value(grid.times[sl])
        maes.append(float(np.mean(np.abs(h_hat.values[sl] - truth))))
    assert np.mean(maes) < 0.15
