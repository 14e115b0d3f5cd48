"""Perturbation fields and the scalars monitored along coupled runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError
from .fitting import DecayFit, cumulative_trapezoid, fit_decay
from .model import Field, GasParams, GasState, d1, trapezoid
from .wave import WaveProfile

EPS_FLOOR = 1e-14

__all__ = [
    "PerturbationFields", "DecayFit", "fit_decay", "perturbation", "phi_func", "psi_func",
    "energy_functional", "quadratic_energy", "poincare_densities", "PoincareReport",
    "weighted_poincare_check", "oscillation", "sup_norm", "interpolation_ratios", "monitor_hook",
]


@dataclass(frozen=True, eq=False)
class PerturbationFields:
    t: float
    phi: Field
    psi: Field
    zeta: Field

    def arrays(self):
        return self.phi.values, self.psi.values, self.zeta.values


def perturbation(state: GasState, profile: WaveProfile, tol: float = 1e-9) -> PerturbationFields:
    """``(v - V, u - U, theta - Theta)`` at a common time."""
    if abs(state.t - profile.t) > tol * max(1.0, abs(state.t)):
        raise DiagnosticError(f"state at t={state.t} but profile at t={profile.t}")
    if state.grid != profile.grid:
        raise DiagnosticError("state and profile live on different grids")
    return PerturbationFields(
        state.t,
        state.v.like(state.v.values - profile.V.values),
        state.u.like(state.u.values - profile.U.values),
        state.theta.like(state.theta.values - profile.Theta.values),
    )


def _check_positive(z, name="z"):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DiagnosticError(f"{name} must be positive")
    return z


def phi_func(z):
    """``z - ln z - 1``: non-negative, zero only at ``z = 1``."""
    z = _check_positive(z)
    out = z - np.log(z) - 1.0
    return out if out.ndim else float(out)


def psi_func(z):
    """``1/z + ln z - 1``."""
    z = _check_positive(z)
    out = 1.0 / z + np.log(z) - 1.0
    return out if out.ndim else float(out)


def _phi_stable(z):
    # z - ln z - 1 loses all digits near z = 1; use log1p on the offset
    w = z - 1.0
    return w - np.log1p(w)


def energy_functional(state: GasState, profile: WaveProfile, params: GasParams) -> float:
    """``int psi^2/2 + R Theta Phi(v/V) + c_v Theta Phi(theta/Theta) dx``."""
    v = _check_positive(state.v.values, "v")
    th = _check_positive(state.theta.values, "theta")
    V = _check_positive(profile.V.values, "V")
    Th = _check_positive(profile.Theta.values, "Theta")
    psi = state.u.values - profile.U.values
    density = (0.5 * psi**2 + params.R * Th * _phi_stable(v / V)
               + params.c_v * Th * _phi_stable(th / Th))
    return trapezoid(density, state.grid.dx)


def quadratic_energy(state: GasState, profile: WaveProfile, params: GasParams) -> float:
    """Second-order Taylor approximation of :func:`energy_functional`."""
    pert = perturbation(state, profile, tol=math.inf)
    phi, psi, zeta = pert.arrays()
    V, Th = profile.V.values, profile.Theta.values
    density = 0.5 * psi**2 + params.R * Th * phi**2 / (2 * V**2) + params.c_v * zeta**2 / (2 * Th)
    return trapezoid(density, state.grid.dx)


def poincare_densities(pert: PerturbationFields, profile: WaveProfile):
    """Instantaneous ``int Theta_x^2 (phi^2 + zeta^2)`` and ``||(phi_x, zeta_x)||^2``."""
    dx = profile.grid.dx
    phi, _, zeta = pert.arrays()
    lhs = trapezoid(profile.Theta_x.values**2 * (phi**2 + zeta**2), dx)
    rhs = trapezoid(d1(phi, dx) ** 2 + d1(zeta, dx) ** 2, dx)
    return lhs, rhs


@dataclass(frozen=True)
class PoincareReport:
    lhs: float
    rhs: float
    phi0_at_0: float
    ratio: float


def weighted_poincare_check(times, lhs_density, rhs_density, phi0_at_0: float) -> PoincareReport:
    """Time-integrate both sides and report
    ``LHS / (int ||(phi_x, zeta_x)||^2 + |phi0(0)| + 1e-14)``."""
    times = np.asarray(times, dtype=float)
    if times.size < 2 or np.any(np.diff(times) <= 0):
        raise DiagnosticError("need an increasing time series of at least two samples")
    lhs = float(cumulative_trapezoid(times, lhs_density)[-1])
    rhs = float(cumulative_trapezoid(times, rhs_density)[-1])
    return PoincareReport(lhs, rhs, phi0_at_0, lhs / (rhs + abs(phi0_at_0) + EPS_FLOOR))


def oscillation(state: GasState, far_field: tuple[float, float] | None = None):
    """``(sup - inf)`` of ``theta`` and of ``rho = 1/v``.

    Nodes only cover ``[0, L]``; passing ``far_field = (theta_plus, v_plus)``
    includes the limits at infinity, so the result is the oscillation over
    the whole half-line.
    """
    th = state.theta.values
    rho = 1.0 / state.v.values
    if far_field is not None:
        th = np.append(th, far_field[0])
        rho = np.append(rho, 1.0 / far_field[1])
    return float(th.max() - th.min()), float(rho.max() - rho.min())


def sup_norm(pert: PerturbationFields) -> float:
    return float(max(np.max(np.abs(f)) for f in pert.arrays()))


def interpolation_ratios(profile: WaveProfile) -> tuple[float, float]:
    """Empirical constants of the two interpolation bounds on the wave:
    ``sup|Theta_x|^2 / (||(ln Theta)_x|| ||(ln Theta)_xx||)`` and
    ``sup|U_x|^2 / (||(ln Theta)_xx|| ||(ln Theta)_xxx||)``."""
    dx = profile.grid.dx

    def l2(f):
        return math.sqrt(trapezoid(f.values**2, dx))

    n1, n2, n3 = l2(profile.lnTheta_x), l2(profile.lnTheta_xx), l2(profile.lnTheta_xxx)
    first = float(np.max(profile.Theta_x.values**2)) / (n1 * n2 + EPS_FLOOR)
    second = float(np.max(profile.U_x.values**2)) / (n2 * n3 + EPS_FLOOR)
    return first, second


def monitor_hook(params: GasParams, far_field: bool = True):
    """Hook for :func:`contactwave.solver.run_coupled` recording the
    standard per-snapshot scalars."""
    far = (params.theta_plus, params.v_plus) if far_field else None

    def hook(state: GasState, profile: WaveProfile) -> dict:
        pert = perturbation(state, profile)
        phi, psi, zeta = pert.arrays()
        dx = state.grid.dx
        lhs, rhs = poincare_densities(pert, profile)
        osc_theta, osc_rho = oscillation(state, far)
        return {
            "sup_pert": sup_norm(pert),
            "l2_pert": math.sqrt(trapezoid(phi**2 + psi**2 + zeta**2, dx)),
            "h1_seminorm_pert": math.sqrt(rhs + trapezoid(d1(psi, dx) ** 2, dx)),
            "energy": energy_functional(state, profile, params),
            "osc_theta": osc_theta,
            "osc_rho": osc_rho,
            "poincare_lhs_density": lhs,
            "poincare_rhs_density": rhs,
            "phi_at_0": float(phi[0]),
            "zeta_at_0": float(zeta[0]),
            "min_v": float(state.v.values.min()),
            "max_v": float(state.v.values.max()),
            "min_theta": float(state.theta.values.min()),
            "max_theta": float(state.theta.values.max()),
        }

    return hook
