"""Scenario runners and the checks they report.

Every runner takes a :class:`~contactwave.config.ScenarioConfig` and returns
a :class:`RunResult`: pass/fail checks, a per-snapshot time series, an
optional final profile, and scalar metrics that sweeps compare across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .diagnostics import monitor_hook, weighted_poincare_check
from .errors import ConfigError
from .fitting import fit_decay
from .kernel import (KernelConfig, check_bound_2_2, compare_theta_theta2, linear_heat_run,
                     theta2_exact, theta2_residual_check)
from .model import GasParams, Grid1D, WaveParams
from .solver import boundary_ode_reference, initial_perturbed_state, run_coupled
from .wave import (build_profile, bound_lattice, boundedness_report, decay_report,
                   initial_theta, inviscid_sweep, lattice_spread, run_wave,
                   strictly_decreasing, verify_initial_bounds)

TOL_MAX_PRINCIPLE = 1e-10


@dataclass
class Check:
    name: str
    passed: bool
    measured: object
    claim: str
    detail: str = ""


@dataclass
class RunResult:
    kind: str
    checks: list[Check] = field(default_factory=list)
    series_columns: list[str] = field(default_factory=list)
    series_rows: list[list[float]] = field(default_factory=list)
    profile: dict[str, np.ndarray] | None = None
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _nan(n):
    return np.full(n, np.nan)


def wave_only_profile(profile) -> dict[str, np.ndarray]:
    n = profile.grid.n
    return {"x": profile.grid.x, "v": _nan(n), "u": _nan(n), "theta": _nan(n),
            "V": profile.V.values, "U": profile.U.values, "Theta": profile.Theta.values,
            "phi": _nan(n), "psi": _nan(n), "zeta": _nan(n)}


def gas_profile(state, profile) -> dict[str, np.ndarray]:
    return {"x": state.grid.x, "v": state.v.values, "u": state.u.values,
            "theta": state.theta.values, "V": profile.V.values, "U": profile.U.values,
            "Theta": profile.Theta.values, "phi": state.v.values - profile.V.values,
            "psi": state.u.values - profile.U.values,
            "zeta": state.theta.values - profile.Theta.values}


# --- check builders ----------------------------------------------------------

# acceptance slope bounds for the three derivative norms
DECAY_BOUNDS = {"lnx_sq": -0.45, "lnxx_sq": -1.4, "lnxxx_sq": -2.3}


def decay_checks(traj, window) -> list[Check]:
    report = decay_report(traj, window, bounds=DECAY_BOUNDS)
    out = []
    for name, check in report.items():
        out.append(Check(f"decay_{name}", check.passed,
                         check.fit.slope if not check.fit.vacuous else "vacuous",
                         f"slope <= {check.bound:g}", check.fit.describe()))
    return out


def max_principle_check(traj, params: GasParams) -> Check:
    lo = min(params.theta_minus, params.theta_plus) - TOL_MAX_PRINCIPLE
    hi = max(params.theta_minus, params.theta_plus) + TOL_MAX_PRINCIPLE
    worst_lo = min(float(p.Theta.values.min()) for p in traj.snapshots.values())
    worst_hi = max(float(p.Theta.values.max()) for p in traj.snapshots.values())
    return Check("wave_maximum_principle", worst_lo >= lo and worst_hi <= hi,
                 {"min": worst_lo, "max": worst_hi}, f"within [{lo:.12g}, {hi:.12g}]")


def linear_heat_checks(params, wave, grid: Grid1D, t_check: float, kcfg: KernelConfig) -> list[Check]:
    coarse = linear_heat_run(grid, params, wave, t_check, kcfg)
    fine = linear_heat_run(Grid1D(grid.length, 2 * grid.n - 1), params, wave, t_check, kcfg)
    e_c, e_f = coarse.relative_error, fine.relative_error
    ratio = e_c / e_f if e_f > 0 else math.inf
    return [
        Check("linear_heat_match", e_c <= 1e-4, e_c, "relative Linf error <= 1e-4",
              f"n={grid.n}, L={grid.length:g}, t={t_check:g}"),
        Check("linear_heat_refinement", ratio >= 3.5, ratio, "error ratio >= 3.5 when dx halves",
              f"errors {e_c:.3e} -> {e_f:.3e}"),
    ]


def kernel_checks(params, wave, kcfg: KernelConfig, times=(1.0, 5.0)) -> list[Check]:
    boundary = max(abs(theta2_exact(0.0, t, params, wave, kcfg) - params.theta_minus)
                   for t in (1e-3, 1.0, 10.0, 100.0))
    r_c = theta2_residual_check(Grid1D(20.0, 401), times, params, wave, kcfg)
    r_f = theta2_residual_check(Grid1D(20.0, 801), times, params, wave, kcfg)
    ratio = r_c / r_f if r_f > 0 else math.inf
    vacuous = r_c == 0.0
    return [
        Check("kernel_boundary_exact", boundary < 1e-12, boundary, "|theta2(0,t) - theta_minus| < 1e-12"),
        Check("kernel_residual_refinement", vacuous or ratio >= 3.5,
              "vacuous" if vacuous else ratio, "residual ratio >= 3.5 when dx, dt halve",
              f"residuals {r_c:.3e} -> {r_f:.3e}"),
    ]


def growth_times(T: float, count: int) -> np.ndarray:
    head = np.linspace(0.0, 1.0, 21)[:-1]
    return np.concatenate([head, np.geomspace(1.0, T, count)])


def growth_checks(params, wave, kcfg, grid: Grid1D, T: float, window, count: int):
    times = growth_times(T, count)
    kernel_growth = check_bound_2_2(times, params, wave, kcfg, grid, window)
    traj = run_wave(grid, params, wave, T, times)
    comparison = compare_theta_theta2(traj, kcfg, window)
    checks = []
    for name, g in (("growth_theta2x_cumulative", kernel_growth),
                    ("growth_theta_minus_theta2", comparison)):
        checks.append(Check(name, g.passed, g.fit.slope if not g.fit.vacuous else "vacuous",
                            f"growth exponent <= {g.bound:g}", g.fit.describe()))
    return checks, times, kernel_growth, comparison


def initial_bound_checks(params, alphas=(0.5, 1, 2, 4), deltas=(0.1, 0.25, 0.5)) -> list[Check]:
    lattice = bound_lattice(params, alphas, deltas)
    checks = []
    for name in ("L2sq_theta0_x", "weighted_theta0_x", "L2sq_theta0_xx"):
        spread = lattice_spread(lattice, name)
        checks.append(Check(f"lattice_{name}", spread < 10.0, spread, "max/min ratio < 10",
                            f"{len(lattice)} lattice points"))
    jump = abs(params.theta_plus - params.theta_minus)
    worst = max(abs(r.entries["L1_theta0_x"].measured - jump) for r in lattice.values())
    checks.append(Check("L1_theta0_x_equals_jump", worst <= 1e-8, worst,
                        "| ||Theta0_x||_L1 - |jump| | <= 1e-8"))
    return checks


def inviscid_checks(params, wave, kappas, grid, T, ps=(1.0, 2.0, 4.0)):
    rows = inviscid_sweep(params, wave, kappas, grid, T, ps)
    named = {"Theta_L1": (1.0, "Theta"), "U_L2": (2.0, "U"), "V_L2": (2.0, "V")}
    checks = []
    for label, (p, comp) in named.items():
        values = [getattr(r.distances[p], comp) for r in rows]
        checks.append(Check(f"inviscid_{label}_decreasing", strictly_decreasing(values), values,
                            "strictly decreasing along the kappa sweep",
                            f"q={wave.coupling_exponent:g}, kappa={list(kappas)}"))
    return checks, rows


def boundary_ode_measure(params, wave, grid, T, spec, ctl, snapshot_times):
    theta = initial_theta(grid, params, wave)
    state = initial_perturbed_state(build_profile(theta, params), spec)

    def hook(gas, prof):
        return {"phi_at_0": float(gas.v.values[0] - prof.V.values[0])}

    traj = run_coupled(theta, params, state, T, ctl, {"b": hook}, snapshot_times, keep_states=False)
    t = np.array(traj.times)
    phi = traj.column("phi_at_0")
    ref = boundary_ode_reference(t, spec.phi_at_0, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(ref != 0, np.abs(phi - ref) / np.abs(ref), np.abs(phi - ref))
    return t, phi, ref, rel


# --- scenario runners --------------------------------------------------------

def _require_window(cfg: ScenarioConfig):
    lo, hi = cfg.window
    if hi > cfg.T + 1e-12 or lo < 0:
        raise ConfigError(f"{cfg.source}: time.window {list(cfg.window)} must lie within [0, T={cfg.T:g}]")


def run_wave_decay(cfg: ScenarioConfig) -> RunResult:
    _require_window(cfg)
    params, wave, grid = cfg.params, cfg.wave, cfg.grid
    traj = run_wave(grid, params, wave, cfg.T, cfg.snapshot_times, dt0=cfg.wave_dt)
    result = RunResult(cfg.kind)
    result.checks += decay_checks(traj, cfg.window)
    result.checks.append(max_principle_check(traj, params))
    bounds = verify_initial_bounds(initial_theta(grid, params, wave), params, wave)
    jump = abs(params.theta_plus - params.theta_minus)
    l1 = bounds.entries["L1_theta0_x"].measured
    result.checks.append(Check("L1_theta0_x_equals_jump", abs(l1 - jump) <= 1e-8, l1,
                               f"= |theta_plus - theta_minus| = {jump:g} within 1e-8"))
    for name, ratio in bounds.ratios().items():
        result.metrics[f"initial_ratio_{name}"] = ratio
    for name, value in boundedness_report(traj).items():
        result.metrics[f"bounded_{name}"] = value
    keys = list(traj.records)
    result.series_columns = ["t"] + keys
    for t in sorted(traj.snapshots):
        i = int(np.argmin(np.abs(traj.times - t)))
        result.series_rows.append([t] + [float(traj.records[k][i]) for k in keys])
    result.profile = wave_only_profile(traj.snapshot(cfg.T))
    return result


def run_oracle_check(cfg: ScenarioConfig) -> RunResult:
    _require_window(cfg)
    params, wave, kcfg = cfg.params, cfg.wave, cfg.kernel
    result = RunResult(cfg.kind)
    result.checks += linear_heat_checks(params, wave, cfg.grid, float(cfg.get("time.check_time")), kcfg)
    result.checks += kernel_checks(params, wave, kcfg)
    aux = Grid1D(float(cfg.get("grid.aux_length")), int(cfg.get("grid.aux_n")))
    checks, times, kernel_growth, comparison = growth_checks(
        params, wave, kcfg, aux, cfg.T, cfg.window, int(cfg.get("time.snapshot_count")))
    result.checks += checks
    result.series_columns = ["t", "cum_theta2x_sq", "theta_minus_theta2_sq_plus_cum_lnx_sq"]
    result.series_rows = [[float(t), float(a), float(b)]
                          for t, a, b in zip(times, kernel_growth.series, comparison.series)]
    x = aux.x
    final = theta2_exact(x, cfg.T, params, wave, kcfg)
    n = aux.n
    result.profile = {"x": x, "v": _nan(n), "u": _nan(n), "theta": final,
                      "V": _nan(n), "U": _nan(n), "Theta": _nan(n),
                      "phi": _nan(n), "psi": _nan(n), "zeta": _nan(n)}
    return result


def run_kappa_sweep(cfg: ScenarioConfig) -> RunResult:
    values = [float(v) for v in cfg.get("sweep.values")]
    if not values:
        raise ConfigError(f"{cfg.source}: sweep.values must list the kappa values")
    params, wave = cfg.params, cfg.wave
    checks, rows = inviscid_checks(params, wave, values, cfg.grid, cfg.T)
    result = RunResult(cfg.kind, checks)
    ps = sorted(rows[0].distances)
    result.series_columns = ["kappa", "alpha"] + [f"{c}_L{p:g}" for p in ps for c in ("V", "U", "Theta")]
    for r in rows:
        result.series_rows.append([r.kappa, r.alpha] + [getattr(r.distances[p], c)
                                                        for p in ps for c in ("V", "U", "Theta")])
    return result


def run_stability(cfg: ScenarioConfig) -> RunResult:
    params, wave, grid = cfg.params, cfg.wave, cfg.grid
    theta = initial_theta(grid, params, wave)
    profile0 = build_profile(theta, params)
    spec = cfg.perturbation
    state = initial_perturbed_state(profile0, spec)
    traj = run_coupled(theta, params, state, cfg.T, cfg.control, {"m": monitor_hook(params)},
                       cfg.snapshot_times, wave_dt=cfg.wave_dt, keep_states=False)
    return stability_result(cfg, traj, spec)


def stability_result(cfg, traj, spec) -> RunResult:
    params = cfg.params
    result = RunResult(cfg.kind)
    sup = traj.column("sup_pert")
    energy = traj.column("energy")
    vacuous = sup[0] == 0.0
    sup_ratio = float(sup[-1] / sup[0]) if not vacuous else math.nan
    e_ratio = float(energy[-1] / energy[0]) if energy[0] > 0 else math.nan
    result.checks.append(Check("sup_norm_decay", vacuous or sup_ratio < 0.1,
                               "vacuous" if vacuous else sup_ratio, "sup|pert|(T)/sup|pert|(0) < 0.1"))
    result.checks.append(Check("energy_decay", vacuous or e_ratio < 0.1,
                               "vacuous" if vacuous else e_ratio, "E(T)/E(0) < 0.1"))
    lo, hi = cfg.window
    times = np.array(traj.times)
    if not vacuous and np.sum((times >= lo) & (times <= min(hi, times[-1]))) >= 10:
        fit = fit_decay(times, sup, (lo, min(hi, times[-1])))
        result.checks.append(Check("sup_norm_slope", fit.vacuous or fit.slope < 0,
                                   fit.slope if not fit.vacuous else "vacuous", "log-log slope < 0",
                                   fit.describe()))
    m = min(traj.min_v, traj.min_theta)
    M = max(traj.max_v, traj.max_theta)
    result.checks.append(Check("positivity", m > 0, {"m": m, "M": M}, "0 < m <= v, theta <= M",
                               f"v in [{traj.min_v:.6g}, {traj.max_v:.6g}], "
                               f"theta in [{traj.min_theta:.6g}, {traj.max_theta:.6g}]"))
    jump = abs(params.theta_plus - params.theta_minus)
    osc = traj.column("osc_theta")
    result.checks.append(Check("oscillation_lower_bound", bool(np.all(osc >= jump - 1e-6)),
                               float(osc.min()), f"Osc theta >= {jump:g} - 1e-6 at every snapshot"))
    zeta0 = float(np.max(np.abs(traj.column("zeta_at_0"))))
    result.checks.append(Check("boundary_temperature", zeta0 == 0.0, zeta0, "zeta(0, t) == 0"))
    report = weighted_poincare_check(times, traj.column("poincare_lhs_density"),
                                     traj.column("poincare_rhs_density"), spec.phi_at_0)
    result.metrics.update({
        "poincare_ratio": report.ratio, "poincare_lhs": report.lhs, "poincare_rhs": report.rhs,
        "sup_ratio": sup_ratio, "energy_ratio": e_ratio, "m": m, "M": M,
        "gas_steps": float(traj.gas_steps),
    })
    keys = [k for k in traj.hook_results[0] if k != "t"]
    result.series_columns = ["t"] + keys
    result.series_rows = [[r["t"]] + [float(r[k]) for k in keys] for r in traj.hook_results]
    result.profile = gas_profile(traj.final, traj.profiles[-1])
    return result


def run_boundary_ode(cfg: ScenarioConfig) -> RunResult:
    params, wave, grid, spec = cfg.params, cfg.wave, cfg.grid, cfg.perturbation
    if grid.n % 2 == 0:
        raise ConfigError(f"{cfg.source}: grid.n must be odd so the grid can be coarsened by 2")
    coarse = Grid1D(grid.length, (grid.n + 1) // 2)
    snaps = cfg.snapshot_times
    t, phi, ref, rel = boundary_ode_measure(params, wave, grid, cfg.T, spec, cfg.control, snaps)
    _, phi_c, _, rel_c = boundary_ode_measure(params, wave, coarse, cfg.T, spec, cfg.control, snaps)
    dev, dev_c = float(rel.max()), float(rel_c.max())
    ratio = dev_c / dev if dev > 0 else math.inf
    result = RunResult(cfg.kind)
    result.checks.append(Check("boundary_ode_match", dev <= 0.01, dev,
                               "max relative deviation <= 0.01", f"dx={grid.dx:g}, t in [0, {cfg.T:g}]"))
    result.checks.append(Check("boundary_ode_refinement", ratio >= 3.5, ratio,
                               "deviation ratio >= 3.5 when dx halves",
                               f"dx={coarse.dx:g}: {dev_c:.3e}; dx={grid.dx:g}: {dev:.3e}"))
    result.metrics.update({"max_rel_deviation": dev, "max_rel_deviation_coarse": dev_c})
    result.series_columns = ["t", "phi_at_0", "reference", "rel_deviation",
                             "phi_at_0_coarse", "rel_deviation_coarse"]
    result.series_rows = [list(map(float, row)) for row in zip(t, phi, ref, rel, phi_c, rel_c)]
    return result


RUNNERS = {
    "wave-decay": run_wave_decay,
    "oracle-check": run_oracle_check,
    "kappa-sweep": run_kappa_sweep,
    "stability": run_stability,
    "boundary-ode": run_boundary_ode,
}


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    if cfg.kind == "full-acceptance":
        from .acceptance import run_all

        return run_all(cfg)
    return RUNNERS[cfg.kind](cfg)


def run_sweep(cfg: ScenarioConfig, axis: str | None = None, values=None) -> RunResult:
    """Run one sub-scenario per axis value and merge the results in order.

    Each sub-run's checks are prefixed with ``axis=value``; every metric named
    in ``sweep.expect_decreasing`` must fall strictly along the sweep.
    """
    axis = axis or cfg.get("sweep.axis")
    values = list(values if values is not None else cfg.get("sweep.values"))
    if not axis or not values:
        raise ConfigError(f"{cfg.source}: sweep needs sweep.axis and sweep.values")
    subs = []
    for value in values:
        try:
            subs.append(run_scenario(cfg.with_value(axis, value)))
        except Exception as exc:
            # keep the exception type (it selects the exit code) but name the failing value
            exc.args = (f"[{axis}={value}] {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise
    merged = RunResult(f"sweep:{cfg.kind}")
    for value, sub in zip(values, subs):
        for check in sub.checks:
            merged.checks.append(Check(f"{axis}={value}:{check.name}", check.passed, check.measured,
                                       check.claim, check.detail))
    metric_names = sorted(set().union(*(s.metrics for s in subs)))
    for name in cfg.get("sweep.expect_decreasing"):
        series = [s.metrics.get(name, math.nan) for s in subs]
        merged.checks.append(Check(f"{name}_decreasing", strictly_decreasing(series), series,
                                   f"strictly decreasing along {axis}"))
    merged.series_columns = [axis] + metric_names
    merged.series_rows = [[float(v)] + [float(s.metrics.get(m, math.nan)) for m in metric_names]
                          for v, s in zip(values, subs)]
    merged.metrics = {f"{m}[{v}]": s.metrics[m] for v, s in zip(values, subs) for m in s.metrics}
    return merged
