"""Log-log power-law fits shared by the decay and growth checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiagnosticError

MIN_SAMPLES = 10


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through ``(log(1+t), log(value))``.

    ``vacuous`` is set when the quantity is identically zero (or underflows)
    inside the window; such a fit passes every bound.
    """

    slope: float
    intercept: float
    window: tuple[float, float]
    rms: float
    samples: int
    vacuous: bool = False

    def passes(self, bound: float) -> bool:
        return self.vacuous or self.slope <= bound

    def describe(self) -> str:
        if self.vacuous:
            return f"identically zero on [{self.window[0]:g}, {self.window[1]:g}]: vacuous pass"
        return (f"slope {self.slope:.4f} on [{self.window[0]:g}, {self.window[1]:g}] "
                f"({self.samples} samples, rms {self.rms:.2e})")


def fit_decay(times, values, window) -> DecayFit:
    """Fit ``log(value) = intercept + slope*log(1+t)`` over ``window``.

    Raises
    ------
    DiagnosticError
        If fewer than ten samples fall inside the window or it is empty.
    """
    t_lo, t_hi = float(window[0]), float(window[1])
    if not t_hi > t_lo:
        raise DiagnosticError(f"empty window [{t_lo}, {t_hi}]")
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    inside = (t >= t_lo - 1e-12) & (t <= t_hi + 1e-12)
    count = int(inside.sum())
    if count < MIN_SAMPLES:
        raise DiagnosticError(f"only {count} samples in window [{t_lo}, {t_hi}], need {MIN_SAMPLES}")
    y = y[inside]
    if np.any(~(y > 1e-300)):
        return DecayFit(math.nan, math.nan, (t_lo, t_hi), 0.0, count, vacuous=True)
    lt = np.log1p(t[inside])
    ly = np.log(y)
    A = np.column_stack([lt, np.ones_like(lt)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lt + intercept)
    return DecayFit(float(slope), float(intercept), (t_lo, t_hi),
                    float(np.sqrt(np.mean(resid**2))), count)


def cumulative_trapezoid(times, values) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out
