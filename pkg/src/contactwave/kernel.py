"""Exact solution of the linear heat problem used as a trusted oracle.

``theta2`` solves ``theta2_t = a theta2_xx`` on the half-line with
``theta2(0, t) = theta_minus`` and ``theta2(x, 0) = Theta_0(x)``. By the method
of images it is the whole-line heat flow of the odd extension of
``Theta_0 - theta_minus``. Writing the source point as ``h = x + s sqrt(4 a t)``
turns the two-Gaussian integral into

    theta2(x, t) - theta_minus = pi**-1/2 int exp(-s**2) f(x + s sqrt(4 a t)) ds

with ``f`` the odd extension. The integral is evaluated by composite
Gauss-Legendre quadrature on ``[-m_tail, m_tail]`` split at the reflection
point ``s0 = -x / sqrt(4 a t)``. The split is symmetric at ``x = 0``, where the
rule then returns ``theta_minus`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterError
from .fitting import DecayFit, cumulative_trapezoid, fit_decay
from .model import GasParams, Grid1D, WaveParams, d2, trapezoid
from .wave import WaveTrajectory, theta0, theta0_derivatives


@dataclass(frozen=True)
class KernelConfig:
    nodes_per_panel: int = 16
    panels: int = 32
    m_tail: float = 8.0
    t_min: float = 1e-8

    def __post_init__(self):
        if self.m_tail < 6:
            raise ParameterError(f"m_tail must be >= 6, got {self.m_tail}")
        if not self.t_min > 0:
            raise ParameterError("t_min must be positive")
        if self.nodes_per_panel < 2 or self.panels < 1:
            raise ParameterError("need at least one panel of two nodes")


@lru_cache(maxsize=16)
def _gauss_legendre(k: int):
    return np.polynomial.legendre.leggauss(k)


def _panel_rule(lo, hi, panels, k):
    """Nodes/weights of a composite rule on ``[lo_j, hi_j]`` for each row j."""
    z, w = _gauss_legendre(k)
    edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
    half = 0.5 * np.diff(edges, axis=1)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    nodes = (mid[:, :, None] + half[:, :, None] * z[None, None, :]).reshape(lo.size, -1)
    weights = (half[:, :, None] * w[None, None, :]).reshape(lo.size, -1)
    return nodes, weights


def _image_integral(x, t, a, odd_source, cfg: KernelConfig):
    """``pi**-1/2 int exp(-s^2) odd_source(x + s*sigma) ds`` at each x."""
    sigma = math.sqrt(4.0 * a * t)
    m = cfg.m_tail
    s0 = np.clip(-x / sigma, -m, m)
    left_n, left_w = _panel_rule(np.full_like(x, -m), s0, cfg.panels, cfg.nodes_per_panel)
    right_n, right_w = _panel_rule(s0, np.full_like(x, m), cfg.panels, cfg.nodes_per_panel)
    nodes = np.concatenate([left_n, right_n], axis=1)
    weights = np.concatenate([left_w, right_w], axis=1)
    vals = odd_source(x[:, None] + sigma * nodes)
    return (weights * np.exp(-nodes**2) * vals).sum(axis=1) / math.sqrt(math.pi)


def theta2_exact(x, t: float, params: GasParams, wave: WaveParams,
                 cfg: KernelConfig = KernelConfig()) -> np.ndarray:
    """``theta2(x, t)`` at positions ``x >= 0`` (scalar or array) and one time.

    For ``t < cfg.t_min`` the kernel is numerically a delta and
    ``Theta_0(x)`` is returned.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise ValueError("x must be non-negative")
    if t < 0:
        raise ValueError("t must be non-negative")
    if t < cfg.t_min or params.theta_plus == params.theta_minus:
        out = theta0(xa, params, wave)
        out[xa == 0] = params.theta_minus
    else:
        tm = params.theta_minus

        def odd(y):
            return np.sign(y) * (theta0(np.abs(y), params, wave) - tm)

        out = tm + _image_integral(xa, t, params.a, odd, cfg)
    return out if np.ndim(x) else out[0]


def theta2_x_exact(x, t: float, params: GasParams, wave: WaveParams,
                   cfg: KernelConfig = KernelConfig()) -> np.ndarray:
    """Spatial derivative of ``theta2``.

    Differentiating the image form gives the heat flow of the even extension
    of ``Theta_0'``, i.e. the two Gaussian terms add.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if t < cfg.t_min or params.theta_plus == params.theta_minus:
        out = theta0_derivatives(xa, params, wave)[0]
    else:
        def even(y):
            return theta0_derivatives(np.abs(y), params, wave)[0]

        out = _image_integral(xa, t, params.a, even, cfg)
    return out if np.ndim(x) else out[0]


def theta2_residual_check(grid: Grid1D, times, params: GasParams, wave: WaveParams,
                          cfg: KernelConfig = KernelConfig(), dt: float | None = None) -> float:
    """Max over interior nodes and ``times`` of ``|theta2_t - a theta2_xx|``.

    Both derivatives are centred differences (``dt`` defaults to ``dx``), so
    the residual is pure discretisation error and falls as ``dx**2``.
    """
    dt = grid.dx if dt is None else dt
    x = grid.x
    worst = 0.0
    for t in times:
        if not t - dt > 0:
            raise ValueError("times must exceed dt")
        before = theta2_exact(x, t - dt, params, wave, cfg)
        now = theta2_exact(x, t, params, wave, cfg)
        after = theta2_exact(x, t + dt, params, wave, cfg)
        res = (after - before) / (2 * dt) - params.a * d2(now, grid.dx)
        worst = max(worst, float(np.max(np.abs(res[1:-1]))))
    return worst


@dataclass(frozen=True)
class GrowthCheck:
    fit: DecayFit
    bound: float
    times: np.ndarray
    series: np.ndarray

    @property
    def passed(self) -> bool:
        return self.fit.passes(self.bound)


def check_bound_2_2(times, params: GasParams, wave: WaveParams,
                    cfg: KernelConfig = KernelConfig(), grid: Grid1D | None = None,
                    window=(1.0, 100.0), bound: float = 0.6) -> GrowthCheck:
    """Growth exponent of ``int_0^t ||theta2_x||^2 dtau``.

    ``times`` must start at 0 (or the integral misses its head); the spatial
    norm is a trapezoid over ``grid`` (default ``[0, 200]`` with 4001 nodes).
    """
    grid = grid or Grid1D(200.0, 4001)
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must increase")
    x = grid.x
    sq = np.array([trapezoid(theta2_x_exact(x, t, params, wave, cfg) ** 2, grid.dx) for t in times])
    cum = cumulative_trapezoid(times, sq)
    return GrowthCheck(fit_decay(times, cum, window), bound, times, cum)


def compare_theta_theta2(traj: WaveTrajectory, cfg: KernelConfig = KernelConfig(),
                         window=(1.0, 100.0), bound: float = 0.6) -> GrowthCheck:
    """Growth exponent of ``||Theta - theta2||^2 + int_0^t ||(ln Theta)_x||^2``.

    Uses the trajectory's snapshots (at least ten inside ``window``) for the
    first term and its per-step record for the cumulative one.
    """
    times = np.array(sorted(traj.snapshots))
    x, dx = traj.grid.x, traj.grid.dx
    total = []
    for t in times:
        prof = traj.snapshots[t]
        diff = prof.Theta.values - theta2_exact(x, t, traj.params, traj.wave, cfg)
        total.append(trapezoid(diff**2, dx) + traj.at("cum_lnx_sq", t))
    total = np.array(total)
    return GrowthCheck(fit_decay(times, total, window), bound, times, total)


@dataclass(frozen=True)
class LinearHeatRun:
    grid: Grid1D
    t: float
    theta: np.ndarray
    exact: np.ndarray

    @property
    def relative_error(self) -> float:
        return float(np.max(np.abs(self.theta - self.exact)) / np.max(np.abs(self.exact)))


def linear_heat_run(grid: Grid1D, params: GasParams, wave: WaveParams, T: float,
                    cfg: KernelConfig = KernelConfig(), far_samples: int = 4001) -> LinearHeatRun:
    """Forward-Euler solve of ``theta_t = a theta_xx`` (``dt = dx**2/10``).

    Boundary data: ``theta_minus`` at 0 and the exact ``theta2(L, t)`` at the
    far end (cubic-spline interpolated from ``far_samples`` exact values), so
    the only error left is the scheme's own.
    """
    dx, a = grid.dx, params.a
    dt_nominal = dx**2 / 10
    steps = int(math.ceil(T / dt_nominal))
    dt = T / steps
    theta = theta0(grid.x, params, wave)
    theta[0] = params.theta_minus
    sample_t = np.linspace(0.0, T, far_samples)
    far = np.array([theta2_exact(grid.length, s, params, wave, cfg) for s in sample_t])
    far_at = CubicSpline(sample_t, far)(dt * np.arange(1, steps + 1))
    lam = a * dt / dx**2
    for k in range(steps):
        theta[1:-1] += lam * (theta[2:] - 2 * theta[1:-1] + theta[:-2])
        theta[-1] = far_at[k]
    return LinearHeatRun(grid, T, theta, theta2_exact(grid.x, T, params, wave, cfg))


def profile_derivative_check(x, t, params, wave, cfg=KernelConfig(), h=1e-5) -> float:
    """Max gap between :func:`theta2_x_exact` and a centred difference of ``theta2``."""
    x = np.asarray(x, dtype=float)
    fd = (theta2_exact(x + h, t, params, wave, cfg) - theta2_exact(x - h, t, params, wave, cfg)) / (2 * h)
    return float(np.max(np.abs(fd - theta2_x_exact(x, t, params, wave, cfg))))


__all__ = [
    "KernelConfig", "theta2_exact", "theta2_x_exact", "theta2_residual_check",
    "GrowthCheck", "check_bound_2_2", "compare_theta_theta2", "LinearHeatRun",
    "linear_heat_run", "profile_derivative_check",
]
