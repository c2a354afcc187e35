"""Command-line front end.

Every subcommand reads its parameters from defaults, then an optional flat
``key = value`` file (``--config``), then command-line flags.  Tables are written
as CSV (``#`` metadata lines, a header row, ``\\n`` endings) or JSON.

Exit codes: 0 success, 1 internal or verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import estimation
from . import gaussian_core as gc
from . import metrology as met
from . import optimizer
from . import verification
from .errors import GaussphaseError, MixedState, NoThreshold, ParameterError, ZeroSignal

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class ConfigError(ParameterError):
    pass


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


STATE_NAMES = {
    "coherent": gc.Coherent,
    "thermal": gc.Thermal,
    "squeezed_vacuum": gc.SqueezedVacuum,
    "squeezed_thermal": gc.SqueezedThermal,
    "displaced_thermal": gc.DisplacedThermal,
    "displaced_squeezed": gc.DisplacedSqueezed,
}

# (type, default) per command; None defaults mean "not set"
COMMON = {"out": (str, None), "format": (str, None), "seed": (int, None), "verify": (_bool, False)}
STATE_PARAMS = {
    "state": (str, "coherent"),
    "alpha2": (float, 10.0),
    "r": (float, 0.0),
    "theta": (float, 0.0),
    "n_thermal": (float, 0.0),
    "phi": (float, 0.0),
    "T": (float, 1.0),
    "beta2": (float, None),
}
COMMANDS = {
    "sweep-surface": {
        "alpha2": (float, 10.0),
        "T_start": (float, 0.0),
        "T_stop": (float, 1.0),
        "T_steps": (int, 21),
        "xi_start": (float, 0.0),
        "xi_stop": (float, 1.0),
        "xi_steps": (int, 21),
    },
    "split-scan": {"N": (float, 10.0), "steps": (int, 101)},
    "max-cfi": {"N_start": (float, 1.0), "N_stop": (float, 100.0), "N_steps": (int, 100)},
    "states-table": {
        "alpha2": (float, 10.0),
        "r": (float, 0.5),
        "theta": (float, 0.0),
        "n_thermal": (float, 0.5),
        "phi": (float, 0.0),
        "T": (float, 1.0),
    },
    "simulate": {
        **STATE_PARAMS,
        "N": (float, None),
        "true_phi": (float, None),
        "M": (int, 10_000),
        "K": (int, 200),
        "band_lo": (float, 0.85),
        "band_hi": (float, 1.15),
    },
    "verify-oracle": {"cutoff": (int, None)},
}
DEFAULT_FORMAT = {"simulate": "json", "verify-oracle": "csv"}


# --- configuration ------------------------------------------------------------


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve(command: str, file_values: dict, flag_values: dict) -> dict:
    table = {**COMMANDS[command], **COMMON}
    unknown = sorted(set(file_values) - set(table))
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    cfg = {key: default for key, (_, default) in table.items()}
    for source in (file_values, flag_values):
        for key, value in source.items():
            kind = table[key][0]
            try:
                cfg[key] = kind(value) if value is not None else None
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
    fmt = cfg["format"] or DEFAULT_FORMAT.get(command, "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    cfg["format"] = fmt
    return cfg


def _grid(cfg, prefix, lo_bound=None, hi_bound=None):
    steps = cfg[f"{prefix}_steps"]
    start, stop = cfg[f"{prefix}_start"], cfg[f"{prefix}_stop"]
    if steps < 1:
        raise ConfigError(f"{prefix} grid is empty")
    for v in (start, stop):
        if not math.isfinite(v) or (lo_bound is not None and v < lo_bound) or (hi_bound is not None and v > hi_bound):
            raise ConfigError(f"{prefix} grid bound {v!r} outside [{lo_bound}, {hi_bound}]")
    return np.linspace(start, stop, steps)


# --- output -------------------------------------------------------------------


def fmt_number(x):
    """Shortest round-trip text for floats; blank for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def render(columns, rows, metadata, fmt) -> str:
    if fmt == "json":
        payload = {"metadata": metadata, "columns": list(columns), "rows": [dict(zip(columns, r)) for r in rows]}
        return json.dumps(payload, indent=2, default=float) + "\n"
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}={fmt_number(value)}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt_number(v) for v in r) + "\n")
    return buf.getvalue()


def emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands -----------------------------------------------------------------


def cmd_sweep_surface(cfg):
    alpha2 = cfg["alpha2"]
    if not (math.isfinite(alpha2) and alpha2 > 0):
        raise ConfigError("alpha2 must be positive")
    T = _grid(cfg, "T", 0.0, 1.0)
    xi = _grid(cfg, "xi", 0.0, None)
    surface = met.cfi_surface(alpha2, T, xi)
    rows = [(t, x, surface[i, j], surface[i, j] / alpha2) for i, t in enumerate(T) for j, x in enumerate(xi)]
    meta = {"alpha2": alpha2, "snl_plane": alpha2, "qfi_plane": 2 * alpha2}
    emit(render(("T", "xi", "cfi", "cfi_over_alpha2"), rows, meta, cfg["format"]), cfg["out"])
    return EXIT_OK


def cmd_split_scan(cfg):
    n, steps = cfg["N"], cfg["steps"]
    if not (math.isfinite(n) and n > 0) or steps < 2:
        raise ConfigError("need N > 0 and at least two steps")
    rows = []
    for a2 in np.linspace(0.0, n, steps):
        a2 = min(float(a2), n)
        rows.append((a2, met.split_cfi_squeezed(a2, n), met.split_cfi_thermal(a2, n), met.snl(n)[1]))
    meta = {"N_total": n, "optimal_alpha2": met.optimal_alpha2(n), "max_cfi": met.max_cfi(n)}
    emit(render(("alpha2", "cfi_DS", "cfi_DT", "snl"), rows, meta, cfg["format"]), cfg["out"])
    return EXIT_OK


def cmd_max_cfi(cfg):
    grid = _grid(cfg, "N", 0.0, None)
    if np.any(grid <= 0):
        raise ConfigError("N grid must be positive")
    columns = ["N_DS", "max_cfi", "four_N", "ratio"]
    if cfg["verify"]:
        columns += ["oracle_max_cfi", "rel_dev"]
    rows, worst = [], 0.0
    for n in grid:
        value = met.max_cfi(n)
        row = [float(n), value, 4 * n, value / (4 * n)]
        if cfg["verify"]:
            oracle = optimizer.argmax_split(float(n)).max_value
            dev = abs(value - oracle) / value
            worst = max(worst, dev)
            row += [oracle, dev]
        rows.append(row)
    meta = {"verify_tolerance": 1e-6} if cfg["verify"] else {}
    emit(render(columns, rows, meta, cfg["format"]), cfg["out"])
    if cfg["verify"] and worst > 1e-6:
        print(f"verification failed: max relative deviation {worst:.3e} > 1e-6", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _table_specs(cfg):
    a = gc.signal_amplitude(cfg["alpha2"])
    r, theta, nt = cfg["r"], cfg["theta"], cfg["n_thermal"]
    return [
        ("coherent", gc.Coherent(a)),
        ("thermal", gc.Thermal(nt)),
        ("squeezed_vacuum", gc.SqueezedVacuum(r, theta)),
        ("squeezed_thermal", gc.SqueezedThermal(r, theta, nt)),
        ("displaced_thermal", gc.DisplacedThermal(a, nt)),
        ("displaced_squeezed", gc.DisplacedSqueezed(a, r, theta)),
    ]


def _threshold(name, cfg):
    try:
        if name == "coherent":
            return 0.0
        if name == "displaced_thermal":
            return met.threshold_displaced_thermal(cfg["n_thermal"])
        if name == "displaced_squeezed":
            return met.threshold_displaced_squeezed(math.sinh(cfg["r"]) ** 2)
    except NoThreshold:
        return None
    return None


def cmd_states_table(cfg):
    rows = []
    for name, spec in _table_specs(cfg):
        pc = gc.ProtocolConfig(spec, cfg["phi"], cfg["T"])
        n = gc.total_photons(spec)
        mean = met.expected_X(pc)
        try:
            dphi = met.delta_phi_error_prop(pc)
            cfi = met.cfi_gaussian(pc)
        except ZeroSignal:
            dphi = cfi = None
        try:
            qfi = met.qfi_photon_number(spec)
        except MixedState:
            qfi = None
        beats = None if cfi is None or n == 0 else cfi > n
        rows.append((name, n, mean, dphi, cfi, qfi, n, beats, _threshold(name, cfg)))
    columns = ("state", "total_photons", "mean_X", "delta_phi", "cfi", "qfi", "snl_cfi", "beats_snl", "threshold_alpha2")
    meta = {k: cfg[k] for k in ("alpha2", "r", "theta", "n_thermal", "phi", "T")}
    emit(render(columns, rows, meta, cfg["format"]), cfg["out"])
    return EXIT_OK


def build_spec(cfg) -> gc.StateSpec:
    name = cfg["state"]
    if name not in STATE_NAMES:
        raise ConfigError(f"state must be one of {', '.join(STATE_NAMES)}")
    alpha2, r = cfg["alpha2"], cfg["r"]
    if name == "displaced_squeezed" and cfg.get("N") is not None:
        alpha2 = met.optimal_alpha2(cfg["N"])
        r = math.asinh(math.sqrt(cfg["N"] - alpha2))
    a = gc.signal_amplitude(alpha2)
    return {
        "coherent": lambda: gc.Coherent(a),
        "thermal": lambda: gc.Thermal(cfg["n_thermal"]),
        "squeezed_vacuum": lambda: gc.SqueezedVacuum(r, cfg["theta"]),
        "squeezed_thermal": lambda: gc.SqueezedThermal(r, cfg["theta"], cfg["n_thermal"]),
        "displaced_thermal": lambda: gc.DisplacedThermal(a, cfg["n_thermal"]),
        "displaced_squeezed": lambda: gc.DisplacedSqueezed(a, r, cfg["theta"]),
    }[name]()


def build_protocol(cfg) -> gc.ProtocolConfig:
    lo = gc.IdealLO() if cfg.get("beta2") is None else gc.FiniteLO(math.sqrt(cfg["beta2"]))
    return gc.ProtocolConfig(build_spec(cfg), cfg["phi"], cfg["T"], lo)


def cmd_simulate(cfg):
    seed = 42 if cfg["seed"] is None else cfg["seed"]
    run = estimation.McRun(build_protocol(cfg), cfg["M"], cfg["K"], seed, cfg["true_phi"])
    report = estimation.mc_report(run)
    inside = cfg["band_lo"] <= report.ratio <= cfg["band_hi"]
    record = {**report.as_dict(), "state": cfg["state"], "T": cfg["T"], "band": [cfg["band_lo"], cfg["band_hi"]], "within_band": inside}
    if cfg["format"] == "json":
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    else:
        columns = sorted(k for k in record if k != "band")
        text = render(columns, [[record[k] for k in columns]], {"band_lo": cfg["band_lo"], "band_hi": cfg["band_hi"]}, "csv")
    emit(text, cfg["out"])
    print(
        f"simulate: var/crb = {report.ratio:.4f} (band [{cfg['band_lo']}, {cfg['band_hi']}]) "
        f"{'PASS' if inside else 'FAIL'}",
        file=sys.stderr,
    )
    return EXIT_OK if inside else EXIT_FAIL


def cmd_verify_oracle(cfg, checks=None):
    cutoff = cfg["cutoff"]
    if cutoff is not None and cutoff < 2:
        raise ConfigError("cutoff must be at least 2")
    results = verification.run_checks(checks, cutoff)
    warnings = verification.discrepancy_warnings(cutoff)
    lines = []
    for res in results:
        dev = "n/a" if res.deviation is None else f"{res.deviation:.3e}"
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name:<32} dev={dev:<10} tol={res.tolerance:.0e}  {res.identity}"
        if res.message:
            line += f"  [{res.message}]"
        lines.append(line)
    lines.extend(warnings)
    print("\n".join(lines))
    if cfg["out"]:
        rows = [(r.name, r.identity, r.deviation, r.tolerance, "PASS" if r.passed else "FAIL", r.message) for r in results]
        emit(render(("check", "identity", "deviation", "tolerance", "status", "message"), rows, {}, cfg["format"]), cfg["out"])
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed, {len(warnings)} warnings")
    return EXIT_OK if failed == 0 else EXIT_FAIL


HANDLERS = {
    "sweep-surface": cmd_sweep_surface,
    "split-scan": cmd_split_scan,
    "max-cfi": cmd_max_cfi,
    "states-table": cmd_states_table,
    "simulate": cmd_simulate,
    "verify-oracle": cmd_verify_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, table in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--verify", action="store_const", const=True, default=argparse.SUPPRESS)
        for key, (kind, _) in table.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, type=str if kind is _bool else kind, default=argparse.SUPPRESS)
    return parser


def main(argv=None, checks=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve(args.command, file_values, flags)
        if args.command == "verify-oracle":
            return cmd_verify_oracle(cfg, checks)
        return HANDLERS[args.command](cfg)
    except (ParameterError, ZeroSignal, NoThreshold, MixedState, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GaussphaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
