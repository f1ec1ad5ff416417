"""Command-line entry point.

Exit codes: 0 success with all thresholds met, 1 threshold failure (reports
are still written), 2 configuration or domain error, 3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, DomainError, NumericalFailure
from .harness import BenchmarkConfig, run_benchmark, run_convergence, verify_oracle
from .output import dump_exact, exact_csv_name, write_csv, write_gnuplot, write_json

EXIT_OK, EXIT_THRESHOLD, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

# flag dest -> config key
FLAG_KEYS = {
    "cells": "J",
    "cfl": "cfl",
    "tend": "T",
    "scheme": "scheme",
    "law": "law",
    "bc": "bc",
    "xmin": "x_min",
    "xmax": "x_max",
    "seed": "seed",
    "samples": "samples",
}


def read_config_file(path):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    problems = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            problems.append(f"{path}:{lineno}: expected key = value, got {line!r}")
            continue
        values[key.strip()] = value.strip()
    if problems:
        raise ConfigError(problems)
    return values


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--cells", type=int, help="number of cells J")
    common.add_argument("--cfl", type=float)
    common.add_argument("--tend", type=float, help="final time T [s]")
    common.add_argument("--scheme", choices=("relaxation", "rusanov"))
    common.add_argument("--law", choices=("grass", "mpm", "custom"))
    common.add_argument("--bc", choices=("exact", "transmissive"))
    common.add_argument("--xmin", type=float)
    common.add_argument("--xmax", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="swexner",
        description="Shallow Water-Exner benchmark against the closed-form solution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bench", parents=[common], help="run one benchmark and compare to the exact solution")
    conv = sub.add_parser("converge", parents=[common], help="mesh convergence study")
    conv.add_argument("--cells-list", type=_int_list, default=[100, 200, 400, 800])
    ver = sub.add_parser("verify", parents=[common], help="check the exact solution against the PDEs")
    ver.add_argument("--samples", type=int)
    dump = sub.add_parser("exact-dump", parents=[common], help="write exact-solution CSVs")
    dump.add_argument("--times", type=_float_list, default=[0.0], help="comma-separated times")
    return parser


def load_config(args):
    values = read_config_file(args.config) if args.config else {}
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[key] = value
    return BenchmarkConfig.from_mapping(values).validate()


def _bench(cfg, out):
    report = run_benchmark(cfg)
    stem = f"{cfg.scheme}_J{cfg.J}"
    law = cfg.build_law()
    num_csv = write_csv(out / f"{stem}.csv", report.snapshot, law)
    exact_csv = dump_exact(cfg, [report.t_final], out)[0]
    write_gnuplot(out / f"{stem}.gp", num_csv, exact_csv, report.t_final, cfg.scheme, cfg.J)
    write_json(out / f"{stem}_report.json", report.to_dict())
    for name, err in report.norms.items():
        print(f"{name:4s} L1={err.l1:.4e} rel_L1={err.rel_l1:.4e} Linf={err.linf:.4e}")
    print(f"steps={report.steps} wall={report.wall_time:.2f}s "
          f"mass_defect={report.budgets['mass']:.2e} bed_defect={report.budgets['bed']:.2e}")
    for name, ok in report.acceptance().items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if report.passed else EXIT_THRESHOLD


def _converge(cfg, out, cells):
    report = run_convergence(cfg, cells)
    write_json(out / f"converge_{cfg.scheme}.json", report.to_dict())
    for j, e in zip(report.J, report.errors["h"]):
        print(f"J={j:5d} L1(h)={e:.4e}")
    for name, rate in report.rates.items():
        print(f"rate({name}) = {rate:.3f}")
    ok = report.rate_ok("h")
    print(f"{'PASS' if ok else 'FAIL'} rate(h) in [0.7, 1.3]")
    return EXIT_OK if ok else EXIT_THRESHOLD


def _verify(cfg, out, samples):
    report = verify_oracle(cfg, samples=samples)
    write_json(out / "verify.json", report)
    print(f"max residual {report['max_residual']:.3e} (dx={report['dx']}), "
          f"reduction under halving {report['reduction']:.3f}, skipped {report['skipped']}")
    print(f"{'PASS' if report['passed'] else 'FAIL'} oracle verification")
    return EXIT_OK if report["passed"] else EXIT_THRESHOLD


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        cfg = load_config(args)
        if args.command == "bench":
            return _bench(cfg, out)
        if args.command == "converge":
            return _converge(cfg, out, args.cells_list)
        if args.command == "verify":
            return _verify(cfg, out, args.samples)
        paths = dump_exact(cfg, args.times, out)
        for p in paths:
            print(p)
        return EXIT_OK
    except FileNotFoundError as exc:
        print(f"error: config file not found: {exc.filename}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
