"""
Command-line front end.

Exit status is 0 on success, 1 for usage errors (bad flags, unreadable
input, invalid descriptors) and 2 when a computation fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dgps
from .bootstrap import full_sample_fdwb_test, split_bootstrap_test
from .errors import SplitGofError
from .estimators import parse_model
from .harness import McConfig, default_threads, load_config_dicts, run_bench, run_empirical, run_mc, write_outputs
from .split import MIN_LENGTH, compute_residuals, parse_split, read_series_csv

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _level(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _add_common(p, seed=True):
    p.add_argument("--B", type=_positive_int, default=500, help="bootstrap replications (default 500)")
    p.add_argument("--alpha", type=_level, default=0.05, help="test level (default 0.05)")
    p.add_argument("--multiplier", choices=("mammen", "rademacher"), default="mammen")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splitgof", description="Sample-splitting generalized spectral goodness-of-fit tests.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="test one model on a CSV series")
    p.add_argument("data", help="CSV file holding the series (last column by default)")
    p.add_argument("--column", default=None, help="column name or 0-based index")
    p.add_argument("--model", required=True, help='model descriptor, e.g. "ar:1" or "garch:1,1"')
    p.add_argument("--weight", choices=("indicator", "cf"), default="indicator")
    p.add_argument("--scheme", choices=("split", "full"), default="split")
    p.add_argument("--split", default="half", help='"half" or "f:l" (split scheme only)')
    p.add_argument("--no-timing", action="store_true", help="omit elapsed time for byte-stable output")
    _add_common(p)

    p = sub.add_parser("simulate", help="simulate a registered process")
    p.add_argument("--dgp", required=True, help=f"one of: {', '.join(dgps.REGISTRY)}")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--drift", default=None, help='local drift, e.g. "sin:0.3,2"')
    p.add_argument("--drift-l-n", type=_positive_int, default=None)
    p.add_argument("--out", default=None, help="output CSV (stdout when omitted)")

    p = sub.add_parser("mc", help="Monte Carlo rejection rates")
    p.add_argument("--config", default=None, help="TOML file with McConfig keys")
    p.add_argument("--dgp")
    p.add_argument("--null", dest="null_model")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--R", type=_positive_int)
    p.add_argument("--B", type=_positive_int)
    p.add_argument("--alpha", type=_level)
    p.add_argument("--tests", nargs="+", help='e.g. "indicator:split" "cf:full_fdwb"')
    p.add_argument("--seed", type=int)
    p.add_argument("--multiplier", choices=("mammen", "rademacher"))
    p.add_argument("--split")
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out", default=None, help="directory for reps.csv, timing.csv, report.csv")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bench", help="timing table over one or more configs")
    p.add_argument("--config", required=True, help="TOML file (use [[experiment]] for several)")
    p.add_argument("--repeats", type=_positive_int, default=1)
    p.add_argument("--R", type=_positive_int, default=None, help="override replications")
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out", default=None, help="CSV path for the timing table")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("empirical", help="p-value table for several models on one series")
    p.add_argument("data")
    p.add_argument("--column", default=None)
    p.add_argument("--model", action="append", required=True, dest="models",
                   help="model descriptor; repeat for several")
    p.add_argument("--tests", nargs="+", default=["indicator:split", "cf:split"])
    p.add_argument("--split", default="half")
    _add_common(p)
    return parser


def _column(value):
    if value is None:
        return None
    return int(value) if value.lstrip("-").isdigit() else value


def _read(path, column):
    if not Path(path).is_file():
        raise UsageError(f"cannot read {path}")
    try:
        return read_series_csv(path, _column(column))
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _table(rows, columns) -> str:
    def cell(v):
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    body = [[cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) if body else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def _emit(obj, as_json, text):
    if as_json:
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_test(args) -> int:
    series = _read(args.data, args.column)
    try:
        family = parse_model(args.model)
        split = parse_split(args.split, len(series))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    y = series.values
    if args.scheme == "split":
        fitted = family.fit(y, split.f_n)
        res = compute_residuals(fitted, y, split)
        result = split_bootstrap_test(res, weight=args.weight, B=args.B, multiplier=args.multiplier,
                                      alpha=args.alpha, seed=args.seed)
    else:
        result = full_sample_fdwb_test(y, family, B=args.B, multiplier=args.multiplier,
                                       alpha=args.alpha, seed=args.seed, weight=args.weight)
    out = result.to_dict()
    out["provenance"]["data"] = str(args.data)
    if args.no_timing:
        out.pop("elapsed_s")
    prov = out["provenance"]
    text = "\n".join([
        f"model      {prov['model']}   scheme {prov['scheme']}   weight {prov['weight']}   split {prov['split']}",
        f"statistic  {out['statistic']:.6g}",
        f"p-value    {out['p_value']:.4f}   (B={out['B']}, {prov['multiplier']}, seed {prov['seed']})",
        f"critical   {out['critical_value']:.6g} at alpha={prov['alpha']}   reject: {'yes' if out['reject'] else 'no'}",
    ])
    _emit(out, args.json, text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < MIN_LENGTH:
        raise UsageError(f"--n must be at least {MIN_LENGTH}")
    try:
        spec = dgps.DgpSpec(args.dgp, burn_in=args.burn_in)
        drift = dgps.parse_drift(args.drift)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if drift is None:
        series = dgps.simulate(spec, args.n, args.seed)
    else:
        try:
            series = dgps.simulate_local_alternative(spec, args.drift, args.drift_l_n or args.n,
                                                     args.n, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    lines = ["value"] + [repr(float(v)) for v in series.values]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _config_dicts(path) -> list[dict]:
    try:
        return load_config_dicts(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _mc_config(args) -> McConfig:
    keys = ("dgp", "null_model", "n", "R", "B", "alpha", "tests", "seed", "multiplier", "split")
    overrides = {k: getattr(args, k) for k in keys}
    data = {}
    if args.config:
        dicts = _config_dicts(args.config)
        if len(dicts) != 1:
            raise UsageError("mc takes a single experiment; use bench for several")
        data = dicts[0]
    elif args.dgp is None or args.null_model is None:
        raise UsageError("mc needs --config or both --dgp and --null")
    data.setdefault("threads", default_threads())
    overrides["threads"] = args.threads
    try:
        return McConfig.from_dict(data, **overrides)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def cmd_mc(args) -> int:
    config = _mc_config(args)
    report = run_mc(config)
    if args.out:
        write_outputs(report, args.out)
    table = report.table()
    header = "# config: " + json.dumps(config.to_dict(), sort_keys=True)
    _emit({"config": config.to_dict(), "report": table, "estimator_calls": report.estimator_calls},
          args.json, header + "\n" + _table(
              table, ["test", "valid", "failures", "rejection_rate", "mc_se", "mean_elapsed_s"]))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        configs = []
        for d in _config_dicts(args.config):
            d.setdefault("threads", default_threads())
            configs.append(McConfig.from_dict(d, R=args.R, threads=args.threads))
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    table = run_bench(configs, repeats=args.repeats, out_path=args.out)
    header = "# configs: " + json.dumps([c.to_dict() for c in configs], sort_keys=True)
    _emit({"configs": [c.to_dict() for c in configs], "table": table}, args.json,
          header + "\n" + _table(table, ["dgp", "null_model", "n", "B", "test", "mean_seconds",
                                         "per_replication_s"]))
    return EXIT_OK


def cmd_empirical(args) -> int:
    series = _read(args.data, args.column)
    try:
        for m in args.models:
            parse_model(m)
        parse_split(args.split, len(series))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = run_empirical(series, args.models, tests=args.tests, B=args.B, seed=args.seed,
                          split=args.split, multiplier=args.multiplier, alpha=args.alpha)
    header = (f"# data: {args.data} (n={len(series)})  B={args.B}  seed={args.seed}  "
              f"split={args.split}  multiplier={args.multiplier}")
    _emit({"data": str(args.data), "n": len(series), "B": args.B, "seed": args.seed,
           "table": table}, args.json,
          header + "\n" + _table(table, ["model", "test", "statistic", "p_value", "reject"]))
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "mc": cmd_mc, "bench": cmd_bench,
            "empirical": cmd_empirical}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"splitgof {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (SplitGofError, ArithmeticError, ValueError, np.linalg.LinAlgError, MemoryError) as exc:
        sys.stderr.write(f"splitgof {args.command}: computation failed: {type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
