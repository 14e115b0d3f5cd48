"""Evolve the contact-wave temperature and watch its derivative norms decay.

Run: python demos/wave_profile.py
"""

import numpy as np

from contactwave.model import Grid1D, WaveParams, make_params
from contactwave.wave import decay_report, initial_theta, run_wave

params = make_params(R=1.0, gamma=5 / 3, mu=1.0, kappa=1.0, theta_minus=1.0, theta_plus=2.0, v_plus=2.0)
wave = WaveParams(alpha=1.0, delta_0=0.25)
grid = Grid1D(100.0, 2001)

theta = initial_theta(grid, params, wave)
print("a =", params.a, " v_minus =", params.v_minus, " Theta0(L) =", theta.values[-1])

traj = run_wave(grid, params, wave, 40.0, snapshot_times=[1.0, 10.0, 40.0])
for t in (1.0, 10.0, 40.0):
    prof = traj.snapshot(t)
    print(f"t={t:5.1f}  Theta(5)={prof.Theta.values[grid.index_of(5.0)]:.5f}"
          f"  max U={np.max(prof.U.values):.4e}  max|F|={np.max(np.abs(prof.F.values)):.3e}")

# slopes of log ||.||^2 against log(1+t); the asymptotic rates are -1/2, -3/2, -5/2
for name, check in decay_report(traj, (4.0, 40.0)).items():
    print(f"{name:9s} {check.fit.describe()}")
