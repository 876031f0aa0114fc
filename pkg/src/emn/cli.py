"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 entropy unavailable, 4 metric
failure, 5 selftest failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import __version__
from .errors import EntropyUnavailableError, MetricError
from .generators import (
    DEFAULT_INJECTION_FREQUENCY,
    GENERATOR_NAMES,
    ByteSample,
    make_source,
    parse_seed_hex,
    source_bytes,
)
from .report import (
    AnalysisParams,
    build_report,
    evaluate_source,
    render_summary,
    write_comparison,
    write_outputs,
)
from .selftest import run_selftest
from . import bench, stats

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ENTROPY = 3
EXIT_METRIC = 4
EXIT_SELFTEST = 5


def _seed_arg(text: str) -> int:
    try:
        return parse_seed_hex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _formats_arg(text: str) -> frozenset[str]:
    formats = frozenset(f.strip() for f in text.split(",") if f.strip())
    unknown = formats - {"json", "csv", "md"}
    if unknown or not formats:
        raise argparse.ArgumentTypeError(f"formats must be a subset of json,csv,md; got {text!r}")
    return formats


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument(
        "--seed", type=_seed_arg, default=None,
        help="256-bit seed as 64 hex characters; omitted means seed from OS entropy",
    )
    source.add_argument(
        "--bytes", type=_positive_int, default=stats.DEFAULT_SAMPLE_BYTES,
        help="number of bytes to generate or evaluate",
    )
    source.add_argument(
        "-f", "--injection-frequency", type=_positive_int, default=DEFAULT_INJECTION_FREQUENCY,
        help="EMN: inject fresh entropy every f generation cycles",
    )
    source.add_argument(
        "--persist-mixed-state", action="store_true",
        help="EMN: keep the hashed state between injections instead of refreshing it from the PRNG",
    )

    generator = argparse.ArgumentParser(add_help=False)
    generator.add_argument("--generator", choices=GENERATOR_NAMES, default="emn",
                           help="random source to use")

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument(
        "--out-dir", type=Path, default=Path(os.environ.get("EMN_OUT_DIR", "emn-out")),
        help="directory for report files (env EMN_OUT_DIR)",
    )
    analysis.add_argument(
        "--formats", type=_formats_arg, default="json,csv,md",
        metavar="LIST", help="comma-separated subset of json,csv,md",
    )
    analysis.add_argument("--max-lag", type=_positive_int, default=stats.DEFAULT_MAX_LAG,
                          help="largest lag of the autocorrelation series")
    analysis.add_argument("--heatmap-k", type=_positive_int, default=stats.DEFAULT_HEATMAP_K,
                          help="largest lag in the lag-correlation heatmap")
    analysis.add_argument("--n-fft", type=_positive_int, default=stats.DEFAULT_N_FFT,
                          help="periodogram length (power of two)")
    analysis.add_argument("--bench-n", type=_positive_int, default=bench.DEFAULT_BENCH_N,
                          help="timed 256-bit generations")
    analysis.add_argument("--bench-warmup", type=_non_negative_int, default=bench.DEFAULT_WARMUP,
                          help="untimed warmup generations")
    analysis.add_argument("--reps", type=_positive_int, default=1,
                          help="timing repetitions; the median is reported")

    parser = argparse.ArgumentParser(
        prog="emn",
        description="Entropy Mixing Network generator and randomness evaluation.",
        formatter_class=fmt,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[generator, source], formatter_class=fmt,
                       help="write raw random bytes")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    p = sub.add_parser("eval", parents=[generator, source, analysis], formatter_class=fmt,
                       help="evaluate one generator")
    p.add_argument("--input", default=None, metavar="FILE",
                   help="evaluate raw bytes from FILE ('-' for stdin) instead of generating")

    sub.add_parser("compare", parents=[source, analysis], formatter_class=fmt,
                   help="evaluate EMN, the OS source and MT19937 side by side")

    sub.add_parser("selftest", formatter_class=fmt, help="run embedded known-answer vectors")
    return parser


def _params(args) -> AnalysisParams:
    return AnalysisParams(
        sample_bytes=args.bytes,
        max_lag=args.max_lag,
        heatmap_k=args.heatmap_k,
        n_fft=args.n_fft,
        bench_n=args.bench_n,
        bench_warmup=args.bench_warmup,
        reps=args.reps,
    )


def _source(args, name: str):
    if name == "osrandom" and args.seed is not None:
        print("warning: osrandom is not seedable; --seed ignored", file=sys.stderr)
    return make_source(
        name,
        seed=args.seed,
        injection_frequency=args.injection_frequency,
        persist_mixed_state=args.persist_mixed_state,
    )


def cmd_gen(args) -> int:
    sample = source_bytes(_source(args, args.generator), args.bytes)
    if args.out is None:
        try:
            sys.stdout.buffer.write(sample.data)
            sys.stdout.buffer.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); not an error for a byte stream
            devnull = os.open(os.devnull, os.O_WRONLY)
            os.dup2(devnull, sys.stdout.fileno())
    else:
        args.out.write_bytes(sample.data)
    return EXIT_OK


def _evaluate(args, name: str):
    src = _source(args, name)
    # separate instance for timing; same configuration
    timing_src = make_source(
        name,
        seed=getattr(src, "seed", None),
        injection_frequency=args.injection_frequency,
        persist_mixed_state=args.persist_mixed_state,
    )
    return evaluate_source(src, _params(args), timing_src)


def _print_written(paths) -> None:
    for path in paths:
        print(f"wrote {path}")


def cmd_eval(args) -> int:
    params = _params(args)
    if args.input is not None:
        data = sys.stdin.buffer.read() if args.input == "-" else Path(args.input).read_bytes()
        sample = ByteSample(data=data, generator="input", seed="none", seed_origin="none")
        params = dataclasses.replace(params, sample_bytes=len(data))
        report = build_report(sample, None, params)
    else:
        report = _evaluate(args, args.generator)
    print(render_summary(report))
    _print_written(write_outputs(report, args.out_dir, args.formats))
    return EXIT_OK


def cmd_compare(args) -> int:
    reports = []
    for name in GENERATOR_NAMES:
        report = _evaluate(args, name)
        print(render_summary(report))
        reports.append(report)
    paths = []
    for report in reports:
        paths += write_outputs(report, args.out_dir, args.formats - {"md"})
    paths.append(write_comparison(reports, args.out_dir))
    _print_written(paths)
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = run_selftest()
    for check in checks:
        status = "PASS" if check.ok else "FAIL"
        print(f"{status}  {check.name}" + (f"  ({check.detail})" if check.detail else ""))
    failed = [c for c in checks if not c.ok]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed", file=sys.stderr)
        return EXIT_SELFTEST
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "compare": cmd_compare, "selftest": cmd_selftest}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EntropyUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENTROPY
    except MetricError as exc:
        print(f"error: metric {exc.metric} failed: {exc.cause}", file=sys.stderr)
        return EXIT_METRIC


if __name__ == "__main__":
    sys.exit(main())
