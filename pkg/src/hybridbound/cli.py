"""Command-line entry point.

::

    hybridbound bound --config F --out F.json
    hybridbound entropy-curve --config F --eps-min a --eps-max b --steps s --out F.csv
    hybridbound verify --suite {all,gamma,entropy,radius,telescope,rademacher,gap} --seed S
    hybridbound experiment --config F --out F.csv

Numeric payloads are deterministic: JSON uses sorted keys and round-trip
float reprs, CSV uses 17 significant digits. Run metadata (config hash,
version, timestamp, arguments) goes to a ``<out>.manifest.json`` sidecar so
the payload itself stays byte-stable.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import io
import json
import os
import sys

import numpy as np

from . import __version__, bounds, checks, config as cfgmod, empirical
from .errors import ConfigError, HybridBoundError

SUITES = ("gamma", "dudley", "entropy", "perturbation", "radius", "telescope", "rademacher", "gap")

# small gap run used by ``verify`` when no config is given
VERIFY_GAP_CONFIG = """
[circuit]
qubits = 3
T = 4
[data]
noise = 0.1
n_train = [50, 100]
test_multiplier = 10
[training]
steps = 30
lr = 0.5
"""


def fmt_float(x):
    return format(float(x), ".17g")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def write_manifest(out, args, config=None):
    if out is None or out == "-":
        return
    manifest = {
        "config_hash": config.hash() if config is not None else None,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "command": args.command,
        "arguments": {k: v for k, v in vars(args).items() if k != "func"},
        "protocol": "teacher-student generalization gap; artifact construction"
        if args.command == "experiment" else None,
    }
    with open(out + ".manifest.json", "w") as fh:
        fh.write(dumps(manifest))


def _color(text, ok):
    if os.environ.get("NO_COLOR") or not sys.stderr.isatty():
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_bound(args):
    config = cfgmod.load_config(args.config)
    params = config.bound_params(args.N)
    breakdown = bounds.generalization_bound_hybrid(params)
    _write(args.out, dumps({"params": params.to_dict(), "breakdown": breakdown.to_dict()}))
    write_manifest(args.out, args, config)
    return 0


def entropy_curve_rows(params, eps_min, eps_max, steps):
    rows = []
    for eps in np.geomspace(eps_min, eps_max, steps):
        quantum, classical = bounds.entropy_hybrid_parts(params, eps)
        rows.append((float(eps), classical, quantum, quantum + classical))
    return rows


def cmd_entropy_curve(args):
    config = cfgmod.load_config(args.config)
    if not 0 < args.eps_min <= args.eps_max or args.steps < 1:
        raise ConfigError([f"need 0 < eps-min <= eps-max and steps >= 1, got "
                           f"{args.eps_min}, {args.eps_max}, {args.steps}"])
    rows = entropy_curve_rows(config.bound_params(), args.eps_min, args.eps_max, args.steps)
    header = ("eps", "entropy_network", "entropy_unitary_scaled", "entropy_hybrid")
    _write(args.out, csv_text(header, rows))
    write_manifest(args.out, args, config)
    return 0


def run_suite(name, seed, gap_config=None):
    if name == "gamma":
        return checks.gamma_suite()
    if name == "dudley":
        return checks.dudley_suite(seed=seed)
    if name == "entropy":
        return checks.entropy_suite(seed=seed)
    if name == "perturbation":
        return checks.perturbation_suite(seed=seed)
    if name == "radius":
        return checks.radius_suite(seed=seed)
    if name == "telescope":
        return checks.telescope_suite(seed=seed)
    if name == "rademacher":
        return checks.rademacher_suite(seed=seed)
    if name == "gap":
        if gap_config is None:
            gap_config = dataclasses.replace(cfgmod.parse_config(VERIFY_GAP_CONFIG),
                                             seeds=(seed, seed + 1, seed + 2))
        return checks.gap_suite(gap_config)
    raise ValueError(f"unknown suite {name!r}")


def cmd_verify(args):
    names = SUITES if args.suite == "all" else (args.suite,)
    gap_config = cfgmod.load_config(args.config) if args.config else None
    report, ok = {}, True
    for name in names:
        res = run_suite(name, args.seed, gap_config)
        print(_color(res.line(), res.passed), file=sys.stderr)
        summary = res.summary()
        summary.pop("seconds", None)  # keep the report byte-stable
        _strip_seconds(summary)
        report[name] = summary
        ok &= res.passed
    _write(args.out, dumps({"seed": args.seed, "passed": ok, "suites": report}))
    write_manifest(args.out, args, gap_config)
    return 0 if ok else 1


def _strip_seconds(d):
    for v in d.get("details", {}).values():
        if isinstance(v, dict):
            v.pop("seconds", None)
            _strip_seconds(v)


def cmd_experiment(args):
    config = cfgmod.load_config(args.config)
    out = args.out or config.output
    records = empirical.run_gap_experiment(config, workers=args.workers)
    _write(out, csv_text(empirical.GapRecord.CSV_COLUMNS, (r.csv_row() for r in records)))
    write_manifest(out, args, config)
    medians = empirical.median_gaps(records)
    for N, g in medians.items():
        print(f"N={N}: median gap {g:.6g}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hybridbound",
                                description="Generalization bounds for hybrid quantum-classical models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    b = sub.add_parser("bound", help="evaluate the hybrid generalization bound")
    b.add_argument("--config", required=True)
    b.add_argument("--out", default=None)
    b.add_argument("--N", type=int, default=None, help="sample size (default: bound.N or max data.n_train)")
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("entropy-curve", help="tabulate metric entropies over an eps grid")
    e.add_argument("--config", required=True)
    e.add_argument("--eps-min", type=float, required=True)
    e.add_argument("--eps-max", type=float, required=True)
    e.add_argument("--steps", type=int, default=50)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_entropy_curve)

    v = sub.add_parser("verify", help="run numerical verification suites")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--config", default=None, help="experiment config for the gap suite")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("experiment", help="run the teacher-student gap experiment")
    x.add_argument("--config", required=True)
    x.add_argument("--out", default=None)
    x.add_argument("--workers", type=int, default=None)
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"hybridbound: invalid config: {exc}", file=sys.stderr)
        return 2
    except (HybridBoundError, ValueError, OSError) as exc:
        print(f"hybridbound: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
