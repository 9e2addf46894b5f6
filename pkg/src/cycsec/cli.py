"""``cycsec-bench``: run separation grids and write the CSV report."""

from __future__ import annotations

import argparse
import sys

from .bench import BenchConfig, InstanceSpec, aggregate_path, parse_synthetic, run_bench, write_atomic
from .errors import CycsecError
from .separation import Algorithm
from .shrink import Strategy


def _choices(enum_cls, text: str) -> tuple:
    out = []
    for tok in text.split(","):
        tok = tok.strip().upper()
        try:
            out.append(enum_cls(tok))
        except ValueError:
            valid = ",".join(e.value for e in enum_cls)
            raise argparse.ArgumentTypeError(f"unknown value {tok!r} (choose from {valid})") from None
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cycsec-bench",
        description="Benchmark SEC separation (shrinking strategies x exact algorithms).",
    )
    ap.add_argument("--instances", nargs="*", default=[], metavar="FILE", help="CYCSEC instance files")
    ap.add_argument(
        "--synthetic",
        action="append",
        default=[],
        metavar="N,CLUSTERS,CYCLES[,key=value...]",
        help="synthetic instance; overrides such as seed=3,drop=0.05 are allowed (repeatable)",
    )
    ap.add_argument("--size-class", default="", help="size-class tag written for every instance")
    ap.add_argument("--strategies", default=",".join(s.value for s in Strategy), help="comma list (default: all)")
    ap.add_argument("--algos", default=",".join(a.value for a in Algorithm), help="comma list (default: all)")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0, help="base seed; repetition i uses seed+i")
    ap.add_argument("--kin", type=int, default=1)
    ap.add_argument("--kout", type=int, default=1)
    ap.add_argument("--depot-aware", action="store_true")
    ap.add_argument("--skip-if-preprocess", action="store_true", help="skip exact separation when shrinking found a set")
    ap.add_argument("--pair-scan", action="store_true", help="EPG: also try unions of two subtrees")
    ap.add_argument("--verify", action="store_true", help="check every run against the pairwise min-cut oracle")
    ap.add_argument("--no-timings", action="store_true", help="leave timing columns empty (byte-stable output)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        strategies = _choices(Strategy, args.strategies)
        algos = _choices(Algorithm, args.algos)
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    try:
        specs = [InstanceSpec.from_path(p, args.size_class) for p in args.instances]
        specs += [InstanceSpec.from_synthetic(parse_synthetic(s), args.size_class) for s in args.synthetic]
        cfg = BenchConfig(
            instances=tuple(specs),
            strategies=strategies,
            algorithms=algos,
            reps=args.reps,
            seed=args.seed,
            k_in=args.kin,
            k_out=args.kout,
            depot_aware=args.depot_aware,
            skip_if_preprocess=args.skip_if_preprocess,
            pair_scan=args.pair_scan,
            verify=args.verify,
            timings=not args.no_timings,
            jobs=args.jobs,
        )
        report = run_bench(cfg)
    except CycsecError as exc:
        print(f"cycsec-bench: error: {exc}", file=sys.stderr)
        return 1
    if args.out == "-":
        sys.stdout.write(report.rows_csv())
        sys.stdout.write("\n")
        sys.stdout.write(report.aggregate_csv())
    else:
        write_atomic(args.out, report.rows_csv())
        write_atomic(aggregate_path(args.out), report.aggregate_csv())
    sys.stderr.write(report.summary())
    return 2 if report.mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
