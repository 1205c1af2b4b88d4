"""Command-line front end.

Exit codes: 0 success or passing check, 1 failing check or a run that broke
down while stepping, 2 malformed input (config, expression, CSV, precondition).
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .densities import check_density, fisher_rao_geodesic, normalize_density
from .errors import ArclengthDrift, ConfigError, GeohydroError, VacuumFormation
from .expr import eval_expression
from .filament import FilamentCurve, hasimoto_transform
from .io import group_rows, read_rows, write_rows
from .madelung import CotangentPoint, fs_distance, fs_geodesic, madelung_forward, madelung_inverse, normalize
from .runs import simulate
from .verify import CHECKS, ConservationConfig, conservation_report, run_check

WORKERS_ENV = "GEOHYDRO_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def _print_report(report):
    sys.stdout.write(report.to_json() + "\n")
    for line in report.summary_lines():
        print(line, file=sys.stderr)


def cmd_simulate(args):
    mapping = _load_json(args.config)
    if not isinstance(mapping, dict):
        raise ConfigError("config must be a JSON object")
    mapping.setdefault("equation", args.equation)
    if mapping["equation"] != args.equation:
        raise ConfigError(f"config is for {mapping['equation']!r}, not {args.equation!r}")
    out_dir = args.out_dir or mapping.get("out_dir") or "run"
    manifest = simulate(mapping, out_dir=out_dir)
    print(f"wrote {len(manifest.snapshots)} snapshots to {out_dir}")
    return 0


def _workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, count)


def cmd_verify(args):
    name = args.check.replace("-", "_")
    if name == "conservation_report":
        if not args.config:
            raise ConfigError("conservation-report needs --config <manifest.json>")
        data = _load_json(args.config)
        cfg = ConservationConfig() if args.tol is None else ConservationConfig(hamiltonian_tol=args.tol)
        report = conservation_report(data, cfg)
        _print_report(report)
        return 0 if report.passed else 1
    mapping = _load_json(args.config) if args.config else {}
    if name == "all":
        if mapping:
            raise ConfigError("verify all takes no config")
        names = sorted(CHECKS)
        workers = _workers()
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(run_check, names, [None] * len(names), [args.tol] * len(names)))
        else:
            reports = [run_check(n, None, args.tol) for n in names]
        for r in reports:
            _print_report(r)
        return 0 if all(r.passed for r in reports) else 1
    report = run_check(name, mapping, args.tol)
    _print_report(report)
    return 0 if report.passed else 1


def cmd_transform(args):
    times, rows = read_rows(args.input)
    if args.kind == "madelung":
        out = []
        for _, (rho, theta) in group_rows(times, np.real(rows), 2, args.input):
            out.append(madelung_forward(CotangentPoint.gauged(check_density(rho), theta)))
        write_rows(args.output, times[::2], np.array(out))
    elif args.kind == "madelung-inv":
        out_t, out = [], []
        for t, psi in zip(times, rows.astype(complex)):
            p = madelung_inverse(psi)
            out_t += [t, t]
            out += [p.rho, p.theta]
        write_rows(args.output, out_t, np.array(out))
    else:
        out = []
        for _, coords in group_rows(times, np.real(rows), 3, args.input):
            try:
                curve = FilamentCurve(np.stack(coords, axis=1))
            except GeohydroError:
                raise
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            out.append(hasimoto_transform(curve))
        write_rows(args.output, times[::3], np.array(out))
    return 0


GEODESIC_KEYS = {
    "fisher-rao": {"n", "rho0", "rho1", "times", "out"},
    "fubini-study": {"n", "psi0_re", "psi0_im", "v0_re", "v0_im", "times", "out"},
}


def cmd_geodesic(args):
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    allowed = GEODESIC_KEYS[args.kind]
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = allowed - {"n", "times", "out"} - set(cfg)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    n = cfg.get("n", 64)
    times = [float(t) for t in cfg.get("times", np.linspace(0.0, 1.0, 11))]
    out = cfg.get("out", "geodesic.csv")
    if args.kind == "fisher-rao":
        rho0 = normalize_density(eval_expression(cfg["rho0"], n))
        rho1 = normalize_density(eval_expression(cfg["rho1"], n))
        distance = fisher_rao_geodesic(rho0, rho1, 0.0)[1]
        rows = [fisher_rao_geodesic(rho0, rho1, t)[0] for t in times]
    else:
        psi0 = normalize(eval_expression(cfg["psi0_re"], n) + 1j * eval_expression(cfg["psi0_im"], n))
        v0 = eval_expression(cfg["v0_re"], n) + 1j * eval_expression(cfg["v0_im"], n)
        rows = [fs_geodesic(psi0, v0, t) for t in times]
        distance = fs_distance(rows[0], rows[-1]) if rows else 0.0
    write_rows(out, times, np.array(rows))
    print(json.dumps({"distance": distance, "out": out, "samples": len(times)}, sort_keys=True))
    return 0


def build_parser():
    parser = _Parser(prog="geohydro", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate one equation and write CSV snapshots")
    p.add_argument("equation")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a check: " + ", ".join(sorted(CHECKS) + ["all", "conservation-report"]))
    p.add_argument("check")
    p.add_argument("--config")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transform", help="apply a transform to a CSV field file")
    p.add_argument("kind", choices=["madelung", "madelung-inv", "hasimoto"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("geodesic", help="sample an explicit geodesic")
    p.add_argument("kind", choices=sorted(GEODESIC_KEYS))
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_geodesic)
    return parser


def run_cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and args.check.replace("-", "_") not in set(CHECKS) | {"all", "conservation_report"}:
            raise ConfigError(f"unknown check {args.check!r}")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VacuumFormation, ArclengthDrift) as exc:
        print(f"error: run broke down: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except GeohydroError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())
