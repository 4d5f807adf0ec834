"""Command-line interface.

Commands: fit, ci, gof, sample, experiment.  Reports are JSON on stdout
(optionally mirrored to --json-out); data files are plain CSV.  Exit codes:
0 success, 2 usage or data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass

from .bootstrap import (
    DEFAULT_B_BCA,
    DEFAULT_B_PERCENTILE,
    Functional,
    bca_interval,
    percentile_interval,
    resample_estimates,
)
from .errors import DataError, NumericError
from .fitting import fit
from .gld import GldParams, sample as gld_sample
from .gof import ks_test, qq_data
from .harness import run_experiment_from_config
from .qdensity import MIN_SAMPLE_SIZE, SortedSample

_NA_STRINGS = ("", "NA")


@dataclass(frozen=True)
class DataSpec:
    """Where a sample comes from: CSV path, column, header and NA handling."""

    path: str
    column: str = "1"
    has_header: bool = False
    na_policy: str = "skip"

    def __post_init__(self):
        if self.na_policy not in ("skip", "fail"):
            raise DataError(f"na policy must be 'skip' or 'fail', got {self.na_policy!r}")


def load_sample(spec: DataSpec) -> SortedSample:
    """Read one numeric column from a CSV file into a sorted sample."""
    try:
        fh = open(spec.path, newline="", encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot open {spec.path}: {err}") from err
    with fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise DataError(f"{spec.path} is empty")

    if spec.has_header:
        header, rows = rows[0], rows[1:]
        if spec.column in header:
            idx = header.index(spec.column)
        else:
            idx = _column_index(spec.column, len(header))
    else:
        idx = _column_index(spec.column, len(rows[0]))

    values = []
    for lineno, row in enumerate(rows, start=2 if spec.has_header else 1):
        if idx >= len(row):
            raise DataError(f"{spec.path}:{lineno}: row has no column {spec.column!r}")
        cell = row[idx].strip()
        if cell in _NA_STRINGS:
            if spec.na_policy == "fail":
                raise DataError(f"{spec.path}:{lineno}: missing value")
            continue
        try:
            values.append(float(cell))
        except ValueError as err:
            raise DataError(f"{spec.path}:{lineno}: not a number: {cell!r}") from err

    if len(values) < MIN_SAMPLE_SIZE:
        raise DataError(
            f"insufficient data: {len(values)} usable values in {spec.path} "
            f"(need at least {MIN_SAMPLE_SIZE})"
        )
    return SortedSample.from_data(values)


def _column_index(column: str, width: int) -> int:
    try:
        idx = int(column) - 1
    except ValueError:
        raise DataError(f"column {column!r} not found (file has no such header)") from None
    if not 0 <= idx < width:
        raise DataError(f"column {column} out of range; file has {width} columns")
    return idx


def _parse_params(text: str) -> GldParams:
    """Parameters from 'l1,l2,l3,l4' or from a fit-report JSON file."""
    parts = text.split(",")
    if len(parts) == 4:
        try:
            return GldParams(*[float(p) for p in parts])
        except ValueError as err:
            raise DataError(f"bad parameters {text!r}: {err}") from err
    try:
        with open(text, encoding="utf-8") as fh:
            report = json.load(fh)
        return GldParams(
            report["lambda1"], report["lambda2"], report["lambda3"], report["lambda4"]
        )
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
        raise DataError(f"bad params file {text!r}: {err}") from err


def _round17(obj):
    if isinstance(obj, float):
        return float(format(obj, ".17g"))
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def _emit(report: dict, json_out: str | None) -> None:
    text = json.dumps(_round17(report), indent=2)
    print(text)
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _data_spec(args) -> DataSpec:
    return DataSpec(
        path=args.input,
        column=args.column,
        has_header=args.header,
        na_policy=args.na,
    )


def _cmd_fit(args) -> int:
    s = load_sample(_data_spec(args))
    t0 = time.perf_counter()
    r = fit(s)
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    _emit(
        {
            "lambda1": r.params.lambda1,
            "lambda2": r.params.lambda2,
            "lambda3": r.params.lambda3,
            "lambda4": r.params.lambda4,
            "objective": r.objective,
            "J": r.grid.j_count,
            "n": s.n,
            "elapsed_ms": elapsed_ms,
            "warnings": list(r.warnings),
        },
        args.json_out,
    )
    return 0


def _cmd_ci(args) -> int:
    if not 0.0 < args.level < 1.0:
        raise DataError(f"level must lie in (0, 1), got {args.level}")
    s = load_sample(_data_spec(args))
    f = Functional.location() if args.functional == "location" else Functional.skew_diff()
    b = args.B if args.B else (DEFAULT_B_PERCENTILE if args.method == "perc" else DEFAULT_B_BCA)

    t0 = time.perf_counter()
    ests = resample_estimates(s, f, b, args.seed)
    if args.method == "perc":
        ci = percentile_interval(ests, args.level, estimate=f.extractor(fit(s)))
    else:
        ci = bca_interval(s, f, ests, args.level)
    elapsed_ms = (time.perf_counter() - t0) * 1e3

    report = {
        "estimate": ci.estimate,
        "lower": ci.lower,
        "upper": ci.upper,
        "method": ci.method,
        "functional": args.functional,
        "B": ci.b_count,
        "level": ci.level,
        "elapsed_ms": elapsed_ms,
    }
    if ci.z0 is not None:
        report["z0"] = ci.z0
        report["accel"] = ci.accel
    if ci.warnings:
        report["warnings"] = list(ci.warnings)
    _emit(report, args.json_out)
    return 0


def _cmd_gof(args) -> int:
    s = load_sample(_data_spec(args))
    if args.fit:
        params = fit(s).params
    elif args.params:
        params = _parse_params(args.params)
    else:
        raise DataError("gof needs --params or --fit")
    ks = ks_test(s, params)
    report = {
        "D": ks.statistic,
        "p_value": ks.p_value,
        "n": ks.n,
        "params": [params.lambda1, params.lambda2, params.lambda3, params.lambda4],
    }
    if s.n < 30:
        report["approximate"] = True
        report["warnings"] = ["asymptotic p-value is approximate below n = 30"]
    if args.qq:
        with open(args.qq, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["sample", "model"])
            for sq, mq in qq_data(s, params):
                w.writerow([format(sq, ".17g"), format(mq, ".17g")])
    _emit(report, args.json_out)
    return 0


def _cmd_sample(args) -> int:
    params = _parse_params(args.params)
    if args.n < 1:
        raise DataError(f"n must be >= 1, got {args.n}")
    draws = gld_sample(params, args.n, args.seed)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x"])
        for v in draws:
            w.writerow([format(float(v), ".17g")])
    return 0


def _cmd_experiment(args) -> int:
    meta = run_experiment_from_config(args.config, args.out_dir)
    _emit(meta, args.json_out)
    return 0


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file with the sample")
    p.add_argument("--column", default="1", help="column name or 1-based index (default 1)")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--na", choices=("skip", "fail"), default="skip", help="missing-value policy")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gldfit",
        description="Fit the four-parameter generalized lambda distribution by "
        "density-quantile matching; bootstrap intervals, goodness of fit, "
        "sampling and Monte-Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the distribution to a data column")
    _add_data_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out", help="also write the JSON report here")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("ci", help="bootstrap confidence interval for a functional")
    _add_data_args(p)
    p.add_argument("--functional", choices=("location", "skew"), default="location")
    p.add_argument("--method", choices=("perc", "bca"), default="perc")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--B", type=int, default=0, help="resamples (default 500 perc / 2000 bca)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out")
    p.set_defaults(func=_cmd_ci)

    p = sub.add_parser("gof", help="Kolmogorov-Smirnov goodness of fit")
    _add_data_args(p)
    p.add_argument("--params", help="'l1,l2,l3,l4' or a fit-report JSON file")
    p.add_argument("--fit", action="store_true", help="fit the parameters first")
    p.add_argument("--qq", help="write quantile-plot data (CSV) here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out")
    p.set_defaults(func=_cmd_gof)

    p = sub.add_parser("sample", help="draw from a given parameter vector")
    p.add_argument("--params", required=True, help="'l1,l2,l3,l4' or a fit-report JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("experiment", help="run a configured Monte-Carlo experiment")
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help="unused; seed comes from the config")
    p.add_argument("--json-out")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (NumericError, ArithmeticError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
