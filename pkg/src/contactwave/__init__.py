"""Viscous contact waves for 1-D compressible Navier-Stokes on a half line.

Submodules
----------
model        gas parameters, grids and finite-difference helpers
wave         the nonlinear-heat contact profile and its a-priori estimates
kernel       heat-kernel quadrature for the linearised profile
solver       explicit Lagrangian gas solver coupled to the wave
diagnostics  perturbation energy, Poincare ratio and oscillation
cli          scenario runner (``contactwave`` console script)
"""

__version__ = "0.1.0"

from .errors import (ConfigError, ContactWaveError, ContaminationError, DiagnosticError,
                     GridError, ParameterError, StateError, TimeStepError)
from .model import GasParams, GasState, Grid1D, WaveParams, make_params

__all__ = [
    "__version__", "ConfigError", "ContactWaveError", "ContaminationError", "DiagnosticError",
    "GridError", "ParameterError", "StateError", "TimeStepError", "GasParams", "GasState",
    "Grid1D", "WaveParams", "make_params",
]
