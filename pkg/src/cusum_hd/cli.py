"""Command-line interface.

Three subcommands: detect (screen a CSV panel), quantiles (tabulate
critical values) and simulate (run experiment grids from a JSON file).
Outputs embed the full run configuration so any result file can be
reproduced from its own header.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .detector import THRESHOLD_METHODS, VARIANCE_KINDS, UniformChangeDetector
from .errors import ConfigError, CusumHdError, IngestError, InvalidLevel
from .experiments import run_power_cell, run_quantile_cell
from .panel import load_csv
from .quantiles import asymptotic_threshold, parametric_quantile

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_CONFIG = 3
EXIT_DEGENERATE = 4

POWER_HEADER = "model,n,d,delta,r1,r2,r3,r4,r5,ti_star\n"
QUANTILE_HEADER = "model,n,d,L,K,algorithm,factor_loading,q\n"


def _max_workers() -> int:
    raw = os.environ.get("CUSUM_HD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--method", default="parametric-b", choices=THRESHOLD_METHODS)
    p.add_argument("--mc", type=int, default=10**5, help="Monte Carlo replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--conservative", action="store_true")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cusum-hd",
        description="Simultaneous change-point screening for panel data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="screen a CSV panel for level shifts")
    p.add_argument("--input", required=True)
    p.add_argument("--header", action="store_true", help="first row holds labels")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--time-axis", default="rows", choices=("rows", "columns"))
    p.add_argument("--variance", default="star", choices=VARIANCE_KINDS)
    p.add_argument("--bandwidth", type=int, default=None)
    p.add_argument("--b-tau", type=float, default=0.8)
    p.add_argument("--trim", type=float, default=0.05)
    p.add_argument("--boot-trim", type=float, default=0.0)
    p.add_argument("--L", type=int, default=25, help="bootstrap block count")
    p.add_argument("--weight", default="plain", choices=("plain", "bartlett"))
    _add_common(p)

    p = sub.add_parser("quantiles", help="tabulate simultaneous critical values")
    p.add_argument("--n", default="100", help="comma-separated sample sizes")
    p.add_argument("--d", default="100", help="comma-separated dimensions")
    _add_common(p)

    p = sub.add_parser("simulate", help="run an experiment grid from JSON")
    p.add_argument("--grid", required=True)
    p.add_argument("--out", default=None)
    return parser


def _write(out, text: str):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_detect(args) -> int:
    try:
        panel = load_csv(
            args.input,
            has_header=args.header,
            delimiter=args.delimiter,
            time_axis=args.time_axis,
        )
    except CusumHdError as exc:
        print("ingest error: %s" % exc, file=sys.stderr)
        return EXIT_INGEST
    detector = UniformChangeDetector(
        alpha=args.alpha,
        method=args.method,
        variance=args.variance,
        mc_replicates=args.mc,
        bandwidth=args.bandwidth,
        b_tau=args.b_tau,
        trim=args.trim,
        boot_trim=args.boot_trim,
        blocks_L=args.L,
        weight=args.weight,
        conservative=args.conservative,
        seed=args.seed,
    )
    try:
        detector.fit(panel)
    except (ConfigError, InvalidLevel) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    report = detector.report_
    # a single-sided subsample fallback is routine on short panels; only
    # coordinates with no usable windowed estimate at all count as degenerate
    note_counts = Counter(
        int(note.split()[1].rstrip(":")) for note in report.warnings
    )
    degenerate = {
        h
        for h, cnt in note_counts.items()
        if cnt >= 2 or args.variance == "plain"
    }
    if args.out:
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        with open(args.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    print(
        "unstable=%d of %d threshold=%.4f method=%s"
        % (
            int(report.unstable.sum()),
            panel.d,
            report.threshold.value,
            report.threshold.method,
        )
    )
    if len(degenerate) * 2 > panel.d:
        print(
            "degenerate scale estimates on %d of %d coordinates"
            % (len(degenerate), panel.d),
            file=sys.stderr,
        )
        return EXIT_DEGENERATE
    return EXIT_OK


def _int_list(text: str):
    return [int(x) for x in str(text).split(",") if x != ""]


def cmd_quantiles(args) -> int:
    try:
        ns = _int_list(args.n)
        ds = _int_list(args.d)
        if not ns or not ds:
            raise ConfigError("empty grid")
        if args.method.startswith("block"):
            raise ConfigError("block methods need data; use detect")
        lines = ["n,d,alpha,method,value"]
        for n in ns:
            for d in ds:
                if args.method == "asymptotic":
                    thr = asymptotic_threshold(d, args.alpha, args.conservative)
                else:
                    thr = parametric_quantile(
                        n,
                        d,
                        args.alpha,
                        M=args.mc,
                        method=args.method[-1],
                        seed=args.seed,
                        conservative=args.conservative,
                    )
                lines.append(
                    "%d,%d,%g,%s,%.4f" % (n, d, args.alpha, thr.method, thr.value)
                )
    except (CusumHdError, ValueError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _run_cell(cell: dict):
    kind = cell.get("kind", "power")
    model = cell.get("model", "arma")
    loading = float(cell.get("factor_loading", 0.0))
    if model not in ("arma", "factor"):
        raise ConfigError("unknown model %r" % model)
    n, d = int(cell["n"]), int(cell["d"])
    seed = int(cell.get("seed", 0))
    if kind == "power":
        thr = cell.get("threshold")
        if thr is None:
            thr = parametric_quantile(
                n,
                d,
                float(cell.get("alpha", 0.05)),
                M=int(cell.get("mc", 10**5)),
                seed=seed,
            ).value
        rows = []
        for delta in cell.get("deltas", [0.0]):
            res = run_power_cell(
                n,
                d,
                float(delta),
                int(cell.get("runs", 100)),
                float(thr),
                seed,
                variance=cell.get("variance", "star"),
                factor_loading=loading,
            )
            rows.append(
                "%s,%d,%d,%g,%s,%.2f"
                % (
                    model,
                    n,
                    d,
                    delta,
                    ",".join("%.2f" % v for v in res.r),
                    res.ti_star,
                )
            )
        return rows
    if kind == "quantile":
        L = int(cell.get("L", 25))
        q = run_quantile_cell(
            n,
            d,
            L,
            int(cell.get("algorithm", 2)),
            int(cell.get("panels", 1)),
            int(cell.get("mc", 1000)),
            seed,
            int(cell.get("boot_seed", seed)),
            alpha=float(cell.get("alpha", 0.05)),
            factor_loading=loading,
        )
        return [
            "%s,%d,%d,%d,%d,%d,%g,%.4f"
            % (model, n, d, L, n // L, int(cell.get("algorithm", 2)), loading, q)
        ]
    raise ConfigError("unknown cell kind %r" % kind)


def cmd_simulate(args) -> int:
    try:
        with open(args.grid, encoding="utf-8") as fh:
            grid = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print("config error: cannot read grid: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    cells = grid.get("cells", [])
    kinds = {c.get("kind", "power") for c in cells}
    header = QUANTILE_HEADER if kinds == {"quantile"} else POWER_HEADER
    try:
        if not cells:
            _write(args.out, header)
            return EXIT_OK
        if len(kinds) > 1:
            raise ConfigError("grid mixes power and quantile cells")
        workers = min(_max_workers(), len(cells))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_cell, cells))
        else:
            results = [_run_cell(cell) for cell in cells]
    except (CusumHdError, KeyError, ValueError) as exc:
        print("config error: malformed grid: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    body = "".join(line + "\n" for rows in results for line in rows)
    _write(args.out, header + body)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    if args.command == "detect":
        return cmd_detect(args)
    if args.command == "quantiles":
        return cmd_quantiles(args)
    return cmd_simulate(args)


if __name__ == "__main__":
    sys.exit(main())
