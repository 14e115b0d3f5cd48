"""Run-directory files: ``series.csv``, ``profile_final.csv`` and ``report.txt``."""

from __future__ import annotations

import math
import subprocess
from pathlib import Path

import numpy as np

PROFILE_COLUMNS = ("x", "v", "u", "theta", "V", "U", "Theta", "phi", "psi", "zeta")


def fmt(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_profile(path: Path, profile: dict[str, np.ndarray] | None) -> None:
    if profile is None:
        path.write_text(",".join(PROFILE_COLUMNS) + "\n")
        return
    rows = zip(*(profile[c] for c in PROFILE_COLUMNS))
    write_csv(path, PROFILE_COLUMNS, rows)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, np.floating, np.integer)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(int(value)) if isinstance(value, (int, np.integer)) else repr(v)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, dict):
        return "{ " + ", ".join(f"{k} = {_toml_value(v)}" for k, v in value.items()) + " }"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return _toml_value(str(value))


def version_stamp() -> str:
    from . import __version__

    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).parent)
        commit = rev.stdout.strip() if rev.returncode == 0 else "unknown"
    except (OSError, subprocess.SubprocessError):
        commit = "unknown"
    return f"{__version__}+{commit}"


def write_report(path: Path, config_data: dict, result=None, *, wall_clock: float,
                 status: str, error: str | None = None, category: str | None = None) -> None:
    """TOML-formatted summary: the scenario echo, one ``[[check]]`` table per
    check, scalar metrics and run metadata."""
    lines = ["[run]", f"status = {_toml_value(status)}",
             f"wall_clock_s = {_toml_value(round(wall_clock, 3))}",
             f"version = {_toml_value(version_stamp())}"]
    if error is not None:
        lines += [f"error_category = {_toml_value(category or 'unknown')}",
                  f"error = {_toml_value(error)}"]
    lines.append("")
    lines.append("[scenario]")
    for key, value in config_data.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_value(value)}")
    for key, value in config_data.items():
        if isinstance(value, dict):
            lines += ["", f"[scenario.{key}]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in value.items()]
    if result is not None:
        if result.metrics:
            lines += ["", "[metrics]"]
            lines += [f'"{k}" = {_toml_value(v)}' for k, v in result.metrics.items()]
        for check in result.checks:
            lines += ["", "[[check]]", f"name = {_toml_value(check.name)}",
                      f"passed = {_toml_value(bool(check.passed))}",
                      f"measured = {_toml_value(check.measured)}",
                      f"claim = {_toml_value(check.claim)}"]
            if check.detail:
                lines.append(f"detail = {_toml_value(check.detail)}")
    path.write_text("\n".join(lines) + "\n")


def write_run(out_dir: Path, config_data: dict, result, *, wall_clock: float) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "series.csv", result.series_columns, result.series_rows)
    write_profile(out_dir / "profile_final.csv", result.profile)
    write_report(out_dir / "report.txt", config_data, result, wall_clock=wall_clock,
                 status="pass" if result.passed else "fail")
