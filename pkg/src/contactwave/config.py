"""Scenario configuration files.

A config is a TOML file with a top-level ``scenario`` key and the flat
sections ``gas``, ``wave``, ``grid``, ``time``, ``perturbation``,
``control``, ``kernel`` and ``sweep``. Each scenario kind has its own
defaults; the file overrides them key by key and unknown keys are errors.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, ContactWaveError
from .kernel import KernelConfig
from .model import GasParams, Grid1D, WaveParams, make_params
from .solver import PerturbationSpec, StepControl

SCENARIOS = ("wave-decay", "oracle-check", "kappa-sweep", "stability", "boundary-ode",
             "full-acceptance")

STANDARD_GAS = {"R": 1.0, "gamma": 5.0 / 3.0, "mu": 1.0, "kappa": 1.0,
                "theta_minus": 1.0, "theta_plus": 2.0, "v_plus": 2.0}

BASE = {
    "scenario": "stability",
    "seed": 0,
    "output_dir": "runs",
    "gas": dict(STANDARD_GAS),
    "wave": {"alpha": 1.0, "delta_0": 0.25, "coupling_exponent": 2.0},
    "grid": {"length": 200.0, "n": 4001, "aux_length": 200.0, "aux_n": 4001},
    "time": {"T": 100.0, "snapshots": [], "snapshot_count": 41, "window": [10.0, 100.0],
             "check_time": 1.0},
    "perturbation": {"shape": "none", "amplitude": 0.0, "center": 5.0, "width": 1.0,
                     "weights": [1.0, 1.0, 1.0], "h1_target": 0.0, "phi_at_0": 0.0,
                     "boundary_width": 0.5, "modes": 8},
    "control": {"cfl_factor": 0.2, "dt_max": 0.0, "eps_bnd": 1e-8, "wave_dt": 0.0},
    "kernel": {"nodes_per_panel": 16, "panels": 32, "m_tail": 8.0, "t_min": 1e-8},
    "sweep": {"axis": "", "values": [], "expect_decreasing": []},
}

# per-scenario departures from BASE
SCENARIO_DEFAULTS = {
    "wave-decay": {"time": {"T": 100.0, "window": [10.0, 100.0], "snapshot_count": 61}},
    "oracle-check": {"grid": {"length": 60.0, "n": 4001},
                     "time": {"T": 100.0, "window": [1.0, 100.0], "snapshot_count": 41}},
    "kappa-sweep": {"grid": {"length": 4.0, "n": 8001}, "time": {"T": 1.0, "snapshot_count": 2},
                    "sweep": {"axis": "gas.kappa", "values": [0.1, 0.05, 0.025]}},
    "stability": {"grid": {"length": 200.0, "n": 8001},
                  "time": {"T": 100.0, "window": [10.0, 100.0], "snapshot_count": 201},
                  "perturbation": {"shape": "derivative-heavy", "amplitude": 0.02,
                                   "center": 5.0, "width": 3.0, "h1_target": 0.5},
                  "control": {"eps_bnd": 1e-5}},
    "boundary-ode": {"grid": {"length": 2.0, "n": 801},
                     "time": {"T": 5.0, "snapshot_count": 51},
                     "perturbation": {"phi_at_0": 0.05},
                     "control": {"eps_bnd": math.inf}},
    "full-acceptance": {},
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict):
            out[key] = _merge(out.get(key, {}), value)
        else:
            out[key] = value
    return out


def defaults_for(kind: str) -> dict:
    if kind not in SCENARIOS:
        raise ConfigError(f"unknown scenario {kind!r}; expected one of {', '.join(SCENARIOS)}")
    return _merge(BASE, SCENARIO_DEFAULTS[kind])


@dataclass
class ScenarioConfig:
    kind: str
    data: dict
    source: str = "<defaults>"

    def get(self, dotted: str):
        node = self.data
        for part in dotted.split("."):
            node = node[part]
        return node

    # typed views ------------------------------------------------------------
    @property
    def params(self) -> GasParams:
        return make_params(**self.data["gas"])

    @property
    def wave(self) -> WaveParams:
        w = self.data["wave"]
        return WaveParams(float(w["alpha"]), float(w["delta_0"]), float(w["coupling_exponent"]))

    @property
    def grid(self) -> Grid1D:
        return Grid1D(float(self.data["grid"]["length"]), int(self.data["grid"]["n"]))

    @property
    def T(self) -> float:
        return float(self.data["time"]["T"])

    @property
    def window(self) -> tuple[float, float]:
        lo, hi = self.data["time"]["window"]
        return float(lo), float(hi)

    @property
    def snapshot_times(self) -> list[float]:
        explicit = [float(s) for s in self.data["time"]["snapshots"]]
        if explicit:
            return sorted(set(explicit) | {self.T})
        count = int(self.data["time"]["snapshot_count"])
        return [self.T * k / (count - 1) for k in range(count)] if count > 1 else [self.T]

    @property
    def perturbation(self) -> PerturbationSpec:
        p = self.data["perturbation"]
        h1 = float(p["h1_target"])
        return PerturbationSpec(
            shape=p["shape"], amplitude=float(p["amplitude"]), center=float(p["center"]),
            width=float(p["width"]), weights=tuple(float(w) for w in p["weights"]),
            h1_target=h1 if h1 > 0 else None, phi_at_0=float(p["phi_at_0"]),
            boundary_width=float(p["boundary_width"]), seed=int(self.data["seed"]),
            modes=int(p["modes"]))

    @property
    def control(self) -> StepControl:
        c = self.data["control"]
        dt_max = float(c["dt_max"])
        return StepControl(float(c["cfl_factor"]), dt_max if dt_max > 0 else None,
                           float(c["eps_bnd"]))

    @property
    def wave_dt(self) -> float | None:
        value = float(self.data["control"]["wave_dt"])
        return value if value > 0 else None

    @property
    def kernel(self) -> KernelConfig:
        k = self.data["kernel"]
        return KernelConfig(int(k["nodes_per_panel"]), int(k["panels"]), float(k["m_tail"]),
                            float(k["t_min"]))

    @property
    def output_dir(self) -> Path:
        return Path(self.data["output_dir"])

    def with_value(self, dotted: str, value) -> "ScenarioConfig":
        data = copy.deepcopy(self.data)
        set_dotted(data, dotted, value, self.source)
        cfg = ScenarioConfig(self.kind, data, self.source)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Build every typed view once so invariant violations surface early."""
        try:
            self.params, self.wave, self.grid, self.kernel, self.control
            self.perturbation
        except ContactWaveError as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{self.source}: {exc}") from exc
        if not self.T > 0:
            raise ConfigError(f"{self.source}: time.T must be positive")
        late = [s for s in self.data["time"]["snapshots"] if float(s) > self.T]
        if late:
            raise ConfigError(f"{self.source}: snapshot time {late[0]} exceeds T = {self.T}")
        lo, hi = self.window
        if not hi > lo:
            raise ConfigError(f"{self.source}: time.window must be increasing")


def _type_ok(default, value) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, str):
        return isinstance(value, str)
    if isinstance(default, list):
        return isinstance(value, list)
    return True


def _line_of(text: str, section: str | None, key: str) -> str:
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped.strip("[]").strip()
        elif stripped.split("=")[0].strip() == key and current == section:
            return f"line {number}: {stripped}"
    return "line ?"


def set_dotted(data: dict, dotted: str, value, source: str = "<override>") -> None:
    parts = dotted.split(".")
    node = data
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"{source}: unknown key {dotted!r}")
        node = node[part]
    leaf = parts[-1]
    if leaf not in node or isinstance(node[leaf], dict):
        raise ConfigError(f"{source}: unknown key {dotted!r}")
    if not _type_ok(node[leaf], value):
        raise ConfigError(f"{source}: {dotted} expects {type(node[leaf]).__name__}, "
                          f"got {type(value).__name__}")
    node[leaf] = float(value) if isinstance(node[leaf], float) else value


def _apply(data: dict, raw: dict, text: str, source: str) -> None:
    for key, value in raw.items():
        if isinstance(value, dict):
            if key not in data or not isinstance(data[key], dict):
                raise ConfigError(f"{source}: unknown section [{key}] ({_line_of(text, None, key)})")
            for sub, subval in value.items():
                where = _line_of(text, key, sub)
                if sub not in data[key]:
                    raise ConfigError(f"{source}: unknown key {key}.{sub} ({where})")
                try:
                    set_dotted(data, f"{key}.{sub}", subval, source)
                except ConfigError as exc:
                    raise ConfigError(f"{exc} ({where})") from None
        else:
            if key not in data or isinstance(data[key], dict):
                raise ConfigError(f"{source}: unknown key {key!r} ({_line_of(text, None, key)})")
            try:
                set_dotted(data, key, value, source)
            except ConfigError as exc:
                raise ConfigError(f"{exc} ({_line_of(text, None, key)})") from None


def parse_config_text(text: str, source: str = "<string>", kind: str | None = None) -> ScenarioConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    kind = kind or raw.get("scenario", "stability")
    if not isinstance(kind, str):
        raise ConfigError(f"{source}: scenario must be a string")
    data = defaults_for(kind)
    raw = dict(raw)
    raw["scenario"] = kind
    _apply(data, raw, text, source)
    cfg = ScenarioConfig(kind, data, source)
    cfg.validate()
    return cfg


def parse_config(path, kind: str | None = None) -> ScenarioConfig:
    """Read a scenario file, fill scenario defaults and validate.

    Raises
    ------
    ConfigError
        Missing file, TOML syntax error, unknown key, wrong value type or an
        invariant violation; the message carries the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, str(path), kind)


def default_config(kind: str) -> ScenarioConfig:
    cfg = ScenarioConfig(kind, defaults_for(kind))
    cfg.data["scenario"] = kind
    cfg.validate()
    return cfg
