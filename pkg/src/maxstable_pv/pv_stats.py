"""Path statistics: power variations, local times, and the CLT bias functionals.

The normalized power variation of order p of a grid path X is

    B(p, X)^n_t = n^{p/2 - 1} * sum_{i=1}^{floor(nt) - 1} |X_{i/n} - X_{(i-1)/n}|^p,

with the upper limit floor(nt) - 1 (one increment short of the horizon).

Local time at level 0 is estimated two independent ways: a kernel count
(1/(h sqrt(n))) sum 1{|sqrt(n) X_{(i-1)/n}| <= h}, whose window function has
exact integral 2h, and the discrete Tanaka residual
|X| - |X_0| - sum sign(X) dX.  Both converge to L^0 for continuous
martingales; their per-path disagreement is itself a diagnostic.

The pair bias functional accumulates, over every retained atom pair (j, k),
the kernel local-time increments of Z_k - Z_j weighted by
lambda(phi_{p, H_s}) / (2 H_s^2) and restricted to the steps where the pair
tops every other atom.  lambda(phi_{p,sigma}) = sigma^{p+1} lambda(phi_{p,1})
exactly (change of variables in the defining double integral), so a single
unit-sigma constant serves every step weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gauss_kernels
from .path_sim import Grid, GridPath, MaxStablePath
from .quadrature import QuadratureConfig

__all__ = [
    "PVSeries",
    "LocalTimeEstimate",
    "power_variation",
    "pv_series",
    "local_time_kernel",
    "local_time_tanaka",
    "local_time_kernel_series",
    "local_time_tanaka_series",
    "clt_bias_functional",
    "clt_bias_functional_const",
    "estimate_h",
    "full_window_slice",
    "lambda_phi_unit",
]


@dataclass(frozen=True)
class PVSeries:
    """B(p, X)^n evaluated at every grid time; nondecreasing, starts at 0."""

    p: int
    grid: Grid
    values: np.ndarray


@dataclass(frozen=True)
class LocalTimeEstimate:
    """A local-time-at-zero estimate per grid time."""

    method: str
    grid: Grid
    values: np.ndarray
    kernel_halfwidth: float | None = None


def _check_order(p) -> int:
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise ValueError(f"order p must be a positive integer, got {p!r}")
    return int(p)


def power_variation(path: GridPath, p: int, t: float) -> float:
    """Normalized power variation at time t; 0 whenever floor(nt) <= 1."""
    p = _check_order(p)
    n = path.grid.n
    m = path.grid.last_increment(t)
    if m <= 1:
        return 0.0
    d = np.diff(path.values[:m])            # increments i = 1 .. m-1
    return float(n ** (p / 2.0 - 1.0) * np.sum(np.abs(d) ** p))


def pv_series(path: GridPath, p: int) -> PVSeries:
    p = _check_order(p)
    n = path.grid.n
    powers = np.abs(np.diff(path.values)) ** p
    vals = np.zeros(n + 1)
    # B at t = k/n sums increments 1 .. k-1
    vals[2:] = n ** (p / 2.0 - 1.0) * np.cumsum(powers[: n - 1])
    return PVSeries(p=p, grid=path.grid, values=vals)


def local_time_kernel(path: GridPath, t: float, halfwidth: float) -> float:
    """Kernel-count estimate of L^0_t using g = 1_{[-h, h]} (lambda(g) = 2h)."""
    if halfwidth <= 0:
        raise ValueError(f"halfwidth must be positive, got {halfwidth}")
    n = path.grid.n
    m = path.grid.last_increment(t)
    if m <= 1:
        return 0.0
    left = path.values[: m - 1]
    hits = np.abs(math.sqrt(n) * left) <= halfwidth
    return float(hits.sum() / (halfwidth * math.sqrt(n)))


def local_time_kernel_series(path: GridPath, halfwidth: float) -> LocalTimeEstimate:
    if halfwidth <= 0:
        raise ValueError(f"halfwidth must be positive, got {halfwidth}")
    n = path.grid.n
    hits = np.abs(math.sqrt(n) * path.values[: n - 1]) <= halfwidth
    vals = np.zeros(n + 1)
    vals[2:] = np.cumsum(hits) / (halfwidth * math.sqrt(n))
    return LocalTimeEstimate("kernel", path.grid, vals, kernel_halfwidth=halfwidth)


def _sign_plus(x: np.ndarray) -> np.ndarray:
    """sign with sign(0) = +1; fixed convention for reproducibility."""
    return np.where(x >= 0.0, 1.0, -1.0)


def local_time_tanaka(path: GridPath, t: float) -> float:
    """Discrete Tanaka residual |X_{m/n}| - |X_0| - sum sign(X) dX, m = floor(nt)."""
    m = path.grid.last_increment(t)
    if m < 1:
        return 0.0
    v = path.values
    signed = _sign_plus(v[:m]) * np.diff(v[: m + 1])
    return float(abs(v[m]) - abs(v[0]) - signed.sum())


def local_time_tanaka_series(path: GridPath) -> LocalTimeEstimate:
    v = path.values
    signed = _sign_plus(v[:-1]) * np.diff(v)
    vals = np.abs(v) - abs(v[0]) - np.concatenate([[0.0], np.cumsum(signed)])
    return LocalTimeEstimate("tanaka", path.grid, vals)


@lru_cache(maxsize=32)
def lambda_phi_unit(p: int) -> float:
    """lambda(phi_{p,1}), computed once per order and reused via the exact
    sigma^{p+1} scaling law."""
    return gauss_kernels.lambda_integral(p, 1.0, QuadratureConfig(), "phi")


def _pair_indicator_sums(ms_path: MaxStablePath, p: int, t: float,
                         halfwidth: float, step_weights):
    """Common pair/indicator accumulation for both bias-functional routes.

    ``step_weights`` is a vector over left endpoints (or None for plain
    counting); returns the accumulated weighted count.
    """
    if halfwidth <= 0:
        raise ValueError(f"halfwidth must be positive, got {halfwidth}")
    atoms = ms_path.atoms
    if len(atoms) < 2:
        raise ValueError("bias functional needs at least 2 retained atoms")
    grid = ms_path.grid
    n = grid.n
    if halfwidth / math.sqrt(n) >= ms_path.retain_margin:
        raise ValueError(
            f"halfwidth/sqrt(n) = {halfwidth / math.sqrt(n):.3g} reaches the "
            f"retain margin {ms_path.retain_margin}; near-top atoms may be missing")
    m = grid.last_increment(t)
    if m <= 1:
        return 0.0
    Z = np.stack([a.z_path.values[: m - 1] for a in atoms])
    K = Z.shape[0]
    thr = halfwidth / math.sqrt(n)
    if K >= 3:
        top = np.argpartition(Z, kth=range(K - 3, K) if K > 3 else range(K), axis=0)[-3:]
        top_vals = np.take_along_axis(Z, top, axis=0)
    total = 0.0
    for j in range(K):
        zj = Z[j]
        for k in range(j + 1, K):
            zk = Z[k]
            near = np.abs(zj - zk) <= thr
            if not near.any():
                continue
            if K == 2:
                others = np.full(Z.shape[1], -np.inf)
            else:
                not_jk2 = (top[2] != j) & (top[2] != k)
                not_jk1 = (top[1] != j) & (top[1] != k)
                others = np.where(not_jk2, top_vals[2],
                                  np.where(not_jk1, top_vals[1], top_vals[0]))
            fire = near & (np.minimum(zj, zk) > others)
            if step_weights is None:
                total += float(fire.sum())
            else:
                total += float(step_weights[: m - 1] @ fire)
    return total


def clt_bias_functional(ms_path: MaxStablePath, p: int, t: float,
                        halfwidth: float, lambda_phi1: float | None = None) -> float:
    """Pair local-time bias functional with per-step volatility weights.

    The target is  sum_{j<k} int_0^t lambda(phi_{p,H_s}) / (2 H_s^2)
    1{pair on top} dL0 of Z_k - Z_j.  The difference path has quadratic
    variation 2 H^2 ds, so its local-time increment is estimated by
    H^2 / (h sqrt(n)) * 1{|sqrt(n) dZ| <= h}: the band count of a
    variance-2H^2 path picks up dL0 / H^2 (occupation times scale with the
    quadratic variation).  With lambda(phi_{p,sigma}) =
    sigma^{p+1} lambda(phi_{p,1}) the net per-step weight is
    lambda(phi_{p,1}) H^{p+1} / (2 h sqrt(n)).  ``lambda_phi1`` may be
    passed to skip the (cached) unit-sigma quadrature.
    """
    p = _check_order(p)
    lam1 = lambda_phi_unit(p) if lambda_phi1 is None else float(lambda_phi1)
    grid = ms_path.grid
    h_left = ms_path.vol.value(grid.times[: grid.n])
    weights = lam1 * h_left ** (p + 1) / (2.0 * halfwidth * math.sqrt(grid.n))
    return _pair_indicator_sums(ms_path, p, t, halfwidth, weights)


def clt_bias_functional_const(ms_path: MaxStablePath, p: int, t: float,
                              halfwidth: float, lambda_phi1: float | None = None) -> float:
    """Dedicated constant-volatility route: a single prefactor
    lambda(phi_{p,sigma}) / (2 sigma^2) times the indicator-restricted
    local-time sum of the pair differences (each increment sigma^2 / (h
    sqrt(n)) per band hit).  Must agree with the general route on constant
    input."""
    p = _check_order(p)
    if ms_path.vol.kind != "constant":
        raise ValueError("constant-volatility route requires a constant VolatilitySpec")
    sigma = ms_path.vol.sigma
    lam1 = lambda_phi_unit(p) if lambda_phi1 is None else float(lambda_phi1)
    lam_sigma = sigma ** (p + 1) * lam1
    count = _pair_indicator_sums(ms_path, p, t, halfwidth, None)
    n = ms_path.grid.n
    local_time_sum = sigma ** 2 * count / (halfwidth * math.sqrt(n))
    return lam_sigma / (2.0 * sigma ** 2) * local_time_sum


def estimate_h(path: GridPath, p: int, window: int) -> GridPath:
    """Localized volatility estimate from the power-variation law of large
    numbers: on a window of increments around each grid point,

        Hhat^p = n^{p/2} / (count * m_p) * sum |dX|^p,

    returned as Hhat.  Edge windows are truncated to the available
    increments (see full_window_slice for the untruncated interior).
    """
    p = _check_order(p)
    n = path.grid.n
    if not (isinstance(window, (int, np.integer)) and 16 <= window <= n // 4):
        raise ValueError(f"window must be an integer in [16, n/4], got {window!r}")
    powers = np.abs(np.diff(path.values)) ** p
    prefix = np.concatenate([[0.0], np.cumsum(powers)])
    half = window // 2
    j = np.arange(n + 1)
    lo = np.clip(j - half, 0, n)         # increments lo+1 .. hi (1-based)
    hi = np.clip(j + half, 0, n)
    count = hi - lo
    mp = gauss_kernels.abs_moment(p)
    mean_power = (prefix[hi] - prefix[lo]) / count
    h_hat = (n ** (p / 2.0) * mean_power / mp) ** (1.0 / p)
    return GridPath(path.grid, h_hat)


def full_window_slice(n: int, window: int) -> slice:
    """Grid indices whose estimate_h window was not truncated at an edge."""
    half = window // 2
    return slice(half, n - half + 1)
