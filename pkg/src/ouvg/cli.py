"""Command-line front end.

    ouvg simulate       --k 0.2 --theta 0.025 --nu 0.02 --sigma 0.3 --steps 365 --out paths.csv
    ouvg validate       --config docs/validate_ouvg.cfg
    ouvg price-asian    --strike 15 --paths 10000 --out asian.csv
    ouvg price-storage  --config docs/price_storage.cfg --seed 7

A config file holds one ``key = value`` per line with ``#`` comments; flags
override file values, and file values override built-in defaults.

Exit codes: 0 success, 1 validation failure, 2 config or domain error,
3 runtime (including I/O) error.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import validate_ouvg
from .errors import ConfigError, DomainError
from .ou import OUVGParams, TimeGrid, simulate_skeleton
from .pricing import (
    AsianSpec,
    ForwardCurve,
    SpotModel1F,
    SpotModel2F,
    StorageSpec,
    price_asian,
    price_storage,
)
from .vg import VGParams

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

PATHS_HEADER = "path_id,t,value"
MOMENTS_HEADER = "stat,estimated,stderr,theoretical,z"
PRICE_HEADER = "n_paths,price,stdev,error,cpu_seconds,cpu_paths_seconds"


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_OU = {"k": (float, 0.2), "theta": (float, 0.025), "nu": (float, 0.02), "sigma": (float, 0.3),
       "x0": (float, 0.0)}
_RUN = {"seed": (int, 0), "threads": (int, None), "out": (str, None), "quiet": (_bool, False)}

PARAMETERS = {
    "simulate": {**_OU, "symmetric": (_bool, False), "horizon": (float, 1.0), "steps": (int, 365),
                 "paths": (int, 1)},
    "validate": {**_OU, "symmetric": (_bool, False), "dt": (float, 0.2), "steps": (int, 1),
                 "paths": (int, 100_000), "threshold": (float, 4.0), "bootstrap": (int, 200)},
    "price-asian": {**_OU, "theta2": (float, -0.05), "nu2": (float, 0.2), "sigma2": (float, 0.15),
                    "forward": (float, 15.0), "strike": (float, 15.0), "maturity": (float, 1.0),
                    "fixings": (int, 365), "paths": (int, 10_000)},
    "price-storage": {"k": (float, 0.2162), "nu": (float, 0.256), "sigma": (float, 0.201),
                      "x0": (float, 0.0), "forward": (float, 15.0), "horizon": (float, 1.0),
                      "steps": (int, 365), "c_min": (float, 0.0), "c_max": (float, 1.0),
                      "c0": (float, 0.0), "a_in": (float, 0.05), "a_w": (float, 0.05),
                      "k_in": (float, 0.01), "k_out": (float, 0.01), "k_n": (float, 0.0),
                      "penalty": (str, "shortfall"), "penalty_coeff": (float, 1.0),
                      "volume_steps": (int, 100), "paths": (int, 10_000)},
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["params"][name]
        except KeyError:
            raise AttributeError(name) from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; keys are normalised to snake_case."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def build_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Merge defaults, config-file values and flags, converting each to its type."""
    table = {**PARAMETERS[command], **_RUN}
    unknown = sorted(set(file_values) - set(table) - {"command"})
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    if file_values.get("command", command) != command:
        raise ConfigError(f"config is for {file_values['command']!r}, not {command!r}")
    params = {}
    for name, (kind, default) in table.items():
        raw = flag_values.get(name)
        if raw is None:
            raw = file_values.get(name)
        if raw is None:
            params[name] = default
            continue
        try:
            params[name] = kind(raw)
        except ValueError:
            raise ConfigError(f"bad value for {name}: {raw!r}") from None
        if kind is float and not math.isfinite(params[name]):
            raise ConfigError(f"{name} must be finite, got {raw!r}")
    if params["paths"] < 1:
        raise ConfigError(f"paths must be positive, got {params['paths']}")
    if params["threads"] is not None and params["threads"] < 1:
        raise ConfigError(f"threads must be positive, got {params['threads']}")
    return RunConfig(command, params)


# ---------------------------------------------------------------------------
# model construction (validation happens here, before any sampling)

def _ou_params(cfg) -> OUVGParams:
    return OUVGParams.from_values(cfg.k, cfg.theta, cfg.nu, cfg.sigma, cfg.x0)


def _prepare(cfg: RunConfig):
    if cfg.command == "simulate":
        params = _ou_params(cfg)
        if cfg.symmetric and params.theta != 0:
            raise DomainError("symmetric = true requires theta = 0")
        return params, TimeGrid.uniform(cfg.horizon, cfg.steps)
    if cfg.command == "validate":
        params = _ou_params(cfg)
        if cfg.symmetric and params.theta != 0:
            raise DomainError("symmetric = true requires theta = 0")
        if not cfg.dt > 0 or cfg.steps < 1 or cfg.bootstrap < 2:
            raise DomainError("need dt > 0, steps >= 1 and bootstrap >= 2")
        if cfg.paths < 8:
            raise DomainError("validate needs at least 8 paths")
        return (params,)
    if cfg.command == "price-asian":
        curve = ForwardCurve.flat(cfg.forward)
        model = SpotModel2F(curve, _ou_params(cfg), VGParams(cfg.theta2, cfg.nu2, cfg.sigma2))
        if cfg.fixings < 1 or not cfg.maturity > 0:
            raise DomainError("need fixings >= 1 and maturity > 0")
        if cfg.paths < 2:
            raise DomainError("pricing needs at least 2 paths")
        return model, AsianSpec.equally_spaced(cfg.strike, cfg.maturity, cfg.fixings)
    curve = ForwardCurve.flat(cfg.forward)
    model = SpotModel1F(curve, cfg.k, cfg.nu, cfg.sigma, cfg.x0)
    spec = StorageSpec(
        c_min=cfg.c_min, c_max=cfg.c_max, a_in=cfg.a_in, a_w=cfg.a_w, k_in=cfg.k_in,
        k_out=cfg.k_out, k_n=cfg.k_n, penalty=cfg.penalty, penalty_coeff=cfg.penalty_coeff,
        volume_grid_steps=cfg.volume_steps, c0=cfg.c0,
    )
    if cfg.paths < 2:
        raise DomainError("pricing needs at least 2 paths")
    return model, spec, TimeGrid.uniform(cfg.horizon, cfg.steps)


# ---------------------------------------------------------------------------
# execution and reporting

def _fmt(x) -> str:
    return repr(float(x))


def _paths_csv(paths) -> str:
    n, m = paths.values.shape
    buf = io.StringIO()
    buf.write(PATHS_HEADER + "\n")
    ids = np.repeat(np.arange(n), m)
    t = np.tile(paths.grid.t, n)
    np.savetxt(buf, np.column_stack([ids, t, paths.values.ravel()]),
               fmt=["%d", "%.17g", "%.17g"], delimiter=",")
    return buf.getvalue()


def _execute(cfg: RunConfig, prepared):
    """Return ``(csv_text, report_text, exit_code)``."""
    if cfg.command == "simulate":
        params, grid = prepared
        paths = simulate_skeleton(params, grid, cfg.paths, cfg.seed, cfg.symmetric, cfg.threads)
        report = (f"simulated {paths.n_paths} path(s) x {grid.t.size} points, "
                  f"terminal mean {np.mean(paths.values[:, -1]):.6g}")
        return _paths_csv(paths), report, EXIT_OK
    if cfg.command == "validate":
        (params,) = prepared
        report = validate_ouvg(params, cfg.dt, cfg.steps, cfg.paths, cfg.seed, cfg.symmetric,
                               cfg.threads, cfg.threshold, cfg.bootstrap)
        lines = [MOMENTS_HEADER]
        for row in report.rows():
            lines.append(",".join([row[0]] + [_fmt(v) for v in row[1:]]))
        code = EXIT_OK if report.passed else EXIT_VALIDATION
        return "\n".join(lines) + "\n", report.to_text(), code
    if cfg.command == "price-asian":
        model, spec = prepared
        result = price_asian(model, spec, cfg.paths, cfg.seed, threads=cfg.threads)
    else:
        model, spec, grid = prepared
        result = price_storage(model, spec, grid, cfg.paths, cfg.seed, threads=cfg.threads)
    row = [str(result.n_paths)] + [_fmt(v) for v in (result.price, result.stdev, result.error,
                                                      result.cpu_seconds, result.cpu_paths_seconds)]
    report = (f"{cfg.command}: price {result.price:.6f}  stdev {result.stdev:.6f}  "
              f"error {result.error:.6f}  cpu {result.cpu_seconds:.2f}s  "
              f"cpu(paths) {result.cpu_paths_seconds:.2f}s  N_S={result.n_paths}")
    return PRICE_HEADER + "\n" + ",".join(row) + "\n", report, EXIT_OK


def run(cfg: RunConfig) -> int:
    """Validate, execute and write outputs; returns the process exit code."""
    try:
        prepared = _prepare(cfg)
    except (ConfigError, DomainError) as exc:
        print(f"ouvg: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        csv_text, report, code = _execute(cfg, prepared)
        if cfg.out:
            tmp = f"{cfg.out}.tmp{os.getpid()}"
            with open(tmp, "w", newline="") as fh:
                fh.write(csv_text)
            os.replace(tmp, cfg.out)
            if not cfg.quiet:
                print(report)
        else:
            sys.stdout.write(csv_text)
            if not cfg.quiet:
                print(report, file=sys.stderr)
    except (DomainError, ConfigError) as exc:
        print(f"ouvg: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ArithmeticError, RuntimeError, MemoryError) as exc:
        print(f"ouvg: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return code


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ouvg", description="Exact OU-VG simulation and pricing")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, table in PARAMETERS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed")
        p.add_argument("--paths")
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument("--threads")
        p.add_argument("--quiet", action="store_const", const="true")
        for name in table:
            if name == "paths":
                continue
            p.add_argument("--" + name.replace("_", "-"), dest=name)
    return parser


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    try:
        file_values = {}
        if args.config:
            with open(args.config) as fh:
                file_values = parse_config_text(fh.read())
        cfg = build_config(args.command, file_values, flags)
    except OSError as exc:
        print(f"ouvg: error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"ouvg: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
