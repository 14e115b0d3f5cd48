"""Perturb the wave, run the gas solver and print the monitored scalars.

A small-domain version of the stability scenario; takes under a minute.
Run: python demos/perturbed_gas.py
"""

from contactwave.diagnostics import monitor_hook
from contactwave.model import Grid1D, WaveParams, make_params
from contactwave.solver import PerturbationSpec, StepControl, initial_perturbed_state, run_coupled
from contactwave.wave import build_profile, initial_theta

params = make_params(1.0, 5 / 3, 1.0, 1.0, 1.0, 2.0, 2.0)
grid = Grid1D(60.0, 2401)
theta = initial_theta(grid, params, WaveParams(1.0, 0.25))
spec = PerturbationSpec("gaussian-bump", amplitude=0.02, center=5.0, width=1.5, phi_at_0=0.01)
state = initial_perturbed_state(build_profile(theta, params), spec)

traj = run_coupled(theta, params, state, 10.0, StepControl(eps_bnd=1e-5),
                   hooks={"m": monitor_hook(params)}, snapshot_times=[0.5 * k for k in range(21)],
                   keep_states=False)

print(f"{'t':>5} {'sup pert':>11} {'energy':>11} {'phi(0)':>11} {'osc theta':>9}")
for row in traj.hook_results[::2]:
    print(f"{row['t']:5.1f} {row['sup_pert']:11.4e} {row['energy']:11.4e} "
          f"{row['phi_at_0']:11.4e} {row['osc_theta']:9.6f}")
print(f"{traj.gas_steps} gas steps, {traj.wave_steps} wave steps; "
      f"v in [{traj.min_v:.4f}, {traj.max_v:.4f}], theta in [{traj.min_theta:.4f}, {traj.max_theta:.4f}]")
