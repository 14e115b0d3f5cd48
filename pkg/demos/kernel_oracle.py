"""Compare a plain finite-difference heat solve with the image-kernel quadrature.

Run: python demos/kernel_oracle.py
"""

import numpy as np

from contactwave.kernel import linear_heat_run, theta2_exact
from contactwave.model import Grid1D, WaveParams, make_params

params = make_params(1.0, 5 / 3, 1.0, 1.0, 1.0, 2.0, 2.0)
wave = WaveParams(1.0, 0.25)

x = np.array([0.0, 0.5, 2.0, 10.0, 40.0])
for t in (0.1, 1.0, 10.0):
    print(f"t={t:5.1f}", np.array2string(theta2_exact(x, t, params, wave), precision=6))

for n in (1001, 2001):
    run = linear_heat_run(Grid1D(60.0, n), params, wave, 1.0)
    print(f"n={n}: relative max error vs quadrature {run.relative_error:.3e}")
