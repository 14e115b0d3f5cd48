"""Gas parameters, the truncated half-line mesh, nodal fields and the
finite-difference / quadrature toolbox shared by every other module.

All fields are nodal on a uniform grid ``x_i = i * dx`` on ``[0, L]``.
Derivatives are second-order central in the interior with second-order
one-sided stencils at both ends; integrals use the composite trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, ParameterError


@dataclass(frozen=True)
class GasParams:
    """Perfect-gas constants and end states of the contact wave.

    ``p_plus``, ``v_minus``, ``a`` and ``c_v`` are derived; build instances
    through :func:`make_params` so the pressure-matching relation
    ``R*theta_minus/v_minus == R*theta_plus/v_plus`` holds.
    """

    R: float
    gamma: float
    mu: float
    kappa: float
    theta_minus: float
    theta_plus: float
    v_plus: float
    p_plus: float = field(init=False)
    v_minus: float = field(init=False)
    a: float = field(init=False)
    c_v: float = field(init=False)

    def __post_init__(self):
        for name in ("R", "mu", "kappa", "theta_minus", "theta_plus", "v_plus"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 1):
            raise ParameterError(f"gamma must exceed 1, got {self.gamma!r}")
        p_plus = self.R * self.theta_plus / self.v_plus
        object.__setattr__(self, "p_plus", p_plus)
        object.__setattr__(self, "v_minus", self.R * self.theta_minus / p_plus)
        object.__setattr__(
            self, "a", self.kappa * p_plus * (self.gamma - 1) / (self.gamma * self.R**2)
        )
        object.__setattr__(self, "c_v", self.R / (self.gamma - 1))

    @property
    def p_minus(self) -> float:
        return self.R * self.theta_minus / self.v_minus

    def replace(self, **changes) -> "GasParams":
        base = {k: getattr(self, k) for k in
                ("R", "gamma", "mu", "kappa", "theta_minus", "theta_plus", "v_plus")}
        base.update(changes)
        return GasParams(**base)


def make_params(R, gamma, mu, kappa, theta_minus, theta_plus, v_plus) -> GasParams:
    """Build :class:`GasParams`, deriving ``p_plus``, ``v_minus``, ``a``, ``c_v``.

    Raises
    ------
    ParameterError
        If any input is non-positive or ``gamma <= 1``.
    """
    return GasParams(float(R), float(gamma), float(mu), float(kappa),
                     float(theta_minus), float(theta_plus), float(v_plus))


@dataclass(frozen=True)
class WaveParams:
    """Shape of the initial temperature profile.

    ``coupling_exponent`` is the exponent ``q`` of the rule
    ``alpha = kappa**(-q)`` used by the vanishing-conductivity sweep.
    """

    alpha: float = 1.0
    delta_0: float = 0.25
    coupling_exponent: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ParameterError(f"alpha must be positive, got {self.alpha!r}")
        if not (0 < self.delta_0 < 1):
            raise ParameterError(f"delta_0 must lie in (0, 1), got {self.delta_0!r}")

    def coupled_alpha(self, kappa: float) -> float:
        return kappa ** (-self.coupling_exponent)


@dataclass(frozen=True)
class Grid1D:
    length: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise GridError(f"need at least 3 nodes, got {self.n}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise GridError(f"length must be positive, got {self.length!r}")

    @property
    def dx(self) -> float:
        return self.length / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n)

    def index_of(self, position: float) -> int:
        return int(round(min(max(position, 0.0), self.length) / self.dx))


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar nodal values on a :class:`Grid1D`."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise GridError(f"field has shape {values.shape}, grid has {self.grid.n} nodes")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def like(self, values) -> "Field":
        return Field(self.grid, values)

    def __len__(self):
        return self.grid.n

    def __getitem__(self, item):
        return self.values[item]


@dataclass(frozen=True, eq=False)
class GasState:
    """Specific volume, velocity and temperature at time ``t``."""

    t: float
    v: Field
    u: Field
    theta: Field

    def __post_init__(self):
        grids = {self.v.grid, self.u.grid, self.theta.grid}
        if len(grids) != 1:
            raise GridError("v, u and theta must share one grid")

    @property
    def grid(self) -> Grid1D:
        return self.v.grid

    @property
    def positive(self) -> bool:
        return bool(np.all(self.v.values > 0) and np.all(self.theta.values > 0))

    @classmethod
    def from_arrays(cls, t, grid, v, u, theta) -> "GasState":
        return cls(float(t), Field(grid, v), Field(grid, u), Field(grid, theta))


# --- finite differences ------------------------------------------------------

def d1(f: np.ndarray, dx: float) -> np.ndarray:
    n = f.size
    if n < 3:
        raise GridError("first derivative needs at least 3 nodes")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * dx)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dx)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * dx)
    return out


def d2(f: np.ndarray, dx: float) -> np.ndarray:
    n = f.size
    if n < 4:
        raise GridError("second derivative needs at least 4 nodes")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / dx**2
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / dx**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / dx**2
    return out


def d3(f: np.ndarray, dx: float) -> np.ndarray:
    n = f.size
    if n < 6:
        raise GridError("third derivative needs at least 6 nodes")
    out = np.empty_like(f)
    out[2:-2] = (f[4:] - 2 * f[3:-1] + 2 * f[1:-3] - f[:-4]) / (2 * dx**3)
    # second-order one-sided: (-5, 18, -24, 14, -3) / (2 dx^3)
    c = np.array([-5.0, 18.0, -24.0, 14.0, -3.0])
    scale = 2 * dx**3
    for i in (0, 1):
        out[i] = (c @ f[i:i + 5]) / scale
        out[n - 1 - i] = -(c @ f[n - 1 - i - np.arange(5)]) / scale
    return out


_STENCILS = {1: d1, 2: d2, 3: d3}


def derivative(f: Field, order: int = 1) -> Field:
    """Finite-difference derivative of ``f`` of the given order (1, 2 or 3).

    Second-order accurate everywhere: central in the interior and one-sided
    at the two ends.

    Raises
    ------
    GridError
        If the grid has too few nodes for the requested stencil.
    """
    try:
        stencil = _STENCILS[order]
    except KeyError:
        raise ValueError(f"order must be 1, 2 or 3, got {order!r}") from None
    return f.like(stencil(f.values, f.grid.dx))


# --- quadrature --------------------------------------------------------------

def trapezoid(values: np.ndarray, dx: float) -> float:
    return float(dx * (values.sum() - 0.5 * (values[0] + values[-1])))


def norm(f: Field, kind: str = "L2", p: float | None = None) -> float:
    """Norm of a field over ``[0, L]``.

    ``kind`` is one of ``"L2"``, ``"Lp"`` (with ``p >= 1``), ``"sup"`` or
    ``"H1"``; ``H1`` is ``sqrt(||f||^2 + ||f_x||^2)``.
    """
    values, dx = f.values, f.grid.dx
    if kind == "L2":
        return math.sqrt(trapezoid(values**2, dx))
    if kind == "Lp":
        if p is None or p < 1:
            raise ValueError(f"Lp norm needs p >= 1, got {p!r}")
        return trapezoid(np.abs(values) ** p, dx) ** (1.0 / p)
    if kind == "sup":
        return float(np.max(np.abs(values)))
    if kind == "H1":
        fx = d1(values, dx)
        return math.sqrt(trapezoid(values**2, dx) + trapezoid(fx**2, dx))
    raise ValueError(f"unknown norm kind {kind!r}")


def weighted_integral(f: Field, weight: str = "1+x", alpha: float = 1.0) -> float:
    """Trapezoid quadrature of ``f**2 * w`` with ``w = 1 + x`` or ``1 + alpha*x``."""
    x = f.grid.x
    if weight == "1+x":
        w = 1.0 + x
    elif weight == "1+alpha*x":
        w = 1.0 + alpha * x
    else:
        raise ValueError(f"unknown weight {weight!r}")
    return trapezoid(f.values**2 * w, f.grid.dx)
