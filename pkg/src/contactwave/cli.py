"""Command-line entry point: ``contactwave <scenario> [config] [--key.path value ...]``.

Exit status: 0 when every check passes, 1 when any check fails, 2 for
configuration errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .config import SCENARIOS, ScenarioConfig, default_config, parse_config
from .errors import ConfigError, ContactWaveError
from .output import _toml_value, write_report, write_run
from .scenarios import run_scenario, run_sweep

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

# config keys outside any section, also settable as flags
TOP_LEVEL_KEYS = ("seed", "output_dir")


def _parse_value(text: str):
    """Interpret a flag value as a TOML value, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _split_overrides(argv: list[str]) -> tuple[list[str], list[tuple[str, object]]]:
    """Pull ``--dotted.key value`` pairs out of ``argv``; return the rest for argparse."""
    rest, pairs = [], []
    i = 0
    while i < len(argv):
        token = argv[i]
        name = token[2:].split("=", 1)[0]
        if not (token.startswith("--") and ("." in name or name in TOP_LEVEL_KEYS)):
            rest.append(token)
            i += 1
            continue
        if "=" in token:
            raw = token.split("=", 1)[1]
        elif i + 1 < len(argv):
            raw = argv[i + 1]
            i += 1
        else:
            raise ConfigError(f"flag --{name} needs a value")
        pairs.append((name, _parse_value(raw)))
        i += 1
    return rest, pairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactwave",
        description="Viscous contact wave and Navier-Stokes stability experiments.",
        epilog="Any config key can be overridden with a flag named by its dotted path, "
               "e.g. --grid.n 2001 --gas.kappa 0.5 --time.T 10.")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in SCENARIOS:
        p = sub.add_parser(kind, help=f"run the {kind} scenario")
        p.add_argument("config", nargs="?", help="TOML scenario file (defaults apply when omitted)")
        p.add_argument("-o", "--output-dir", help="run directory (overrides output_dir)")
    p = sub.add_parser("sweep", help="run a scenario once per value of one config key")
    p.add_argument("config", help="TOML scenario file with a [sweep] section")
    p.add_argument("--axis", help="dotted config key to vary (overrides sweep.axis)")
    p.add_argument("--values", help="comma-separated values (overrides sweep.values)")
    p.add_argument("-o", "--output-dir", help="run directory (overrides output_dir)")
    return parser


def load(kind: str | None, path: str | None, overrides) -> ScenarioConfig:
    cfg = parse_config(path, kind) if path else default_config(kind or "stability")
    for key, value in overrides:
        cfg = cfg.with_value(key, value)
    return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    try:
        argv, overrides = _split_overrides(argv)
    except ConfigError as exc:
        return _fail(exc, None, None, started)
    args = build_parser().parse_args(argv)
    cfg = None
    out_dir = Path(args.output_dir) if args.output_dir else None
    try:
        kind = None if args.command == "sweep" else args.command
        cfg = load(kind, args.config, overrides)
        out_dir = out_dir or cfg.output_dir
        if args.command == "sweep":
            values = None
            if args.values:
                values = [_parse_value(v.strip()) for v in args.values.split(",")]
            result = run_sweep(cfg, args.axis, values)
        else:
            result = run_scenario(cfg)
    except ContactWaveError as exc:
        return _fail(exc, cfg, out_dir, started)
    write_run(out_dir, cfg.data, result, wall_clock=time.perf_counter() - started)
    for check in result.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {_toml_value(check.measured)}  [{check.claim}]")
    print(f"wrote {out_dir}")
    return EXIT_PASS if result.passed else EXIT_FAIL


def _fail(exc: ContactWaveError, cfg, out_dir, started) -> int:
    code = exc.exit_code
    print(f"error ({exc.category}): {exc}", file=sys.stderr)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_report(out_dir / "report.txt", cfg.data if cfg else {}, None,
                     wall_clock=time.perf_counter() - started, status="error",
                     error=str(exc), category=exc.category)
    return code if code in (EXIT_CONFIG, EXIT_NUMERICAL) else EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
