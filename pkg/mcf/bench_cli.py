"""
bench_cli — command-line harness for the MCF bench.

  python -m mcf bench  --algorithm all --labels 0,1 --permutations 20 --out results.csv
  python -m mcf verify --synthetic-n 1000 --synthetic-dim 20 --synthetic-gamma 0.1
  python -m mcf trace  --algorithm mcp --limit 50

Exit status: 0 success, 1 verification failure, 2 usage/config, 3 data format,
4 classifier state error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from mcf import config
from mcf.errors import DataError, GeneratorParameterError, McfError, StateError
from mcf.models import ExperimentConfig, SyntheticConfig, TraceConfig
from mcf.orchestrator import run_benchmark, run_trace, run_verification
from mcf.report_engine import generate_text_summary, ordering_count, write_results_csv, write_trace_csv

logger = logging.getLogger("mcf.cli")


# ── Parser ────────────────────────────────────────────────────

def _add_mnist_paths(p: argparse.ArgumentParser, test: bool = True):
    p.add_argument("--train-images", default=config.MNIST_FILES["train_images"], help="Training images (IDX, optionally .gz)")
    p.add_argument("--train-labels", default=config.MNIST_FILES["train_labels"], help="Training labels (IDX)")
    if test:
        p.add_argument("--test-images", default=config.MNIST_FILES["test_images"], help="Test images (IDX)")
        p.add_argument("--test-labels", default=config.MNIST_FILES["test_labels"], help="Test labels (IDX)")


def _add_synthetic(p: argparse.ArgumentParser):
    d = config.SYNTHETIC_DEFAULTS
    p.add_argument("--synthetic-n", type=int, default=d["n"], help="Number of synthetic examples")
    p.add_argument("--synthetic-dim", type=int, default=d["dim"], help="Synthetic dimension")
    p.add_argument("--synthetic-gamma", type=float, default=d["gamma"], help="Required margin gamma")
    p.add_argument("--synthetic-radius", type=float, default=d["radius"], help="Ball radius R")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=config.LOG_LEVEL, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="Master seed")

    parser = argparse.ArgumentParser(prog="mcf", description=config.APP_TITLE)
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", parents=[common], help="MNIST one-vs-rest protocol -> CSV")
    bench.add_argument("--algorithm", default="all", help=f"One of {', '.join(config.ALGORITHMS)}, a comma list, or 'all'")
    bench.add_argument("--labels", default=",".join(str(l) for l in config.MNIST_LABELS), help="Comma list of digits")
    bench.add_argument("--permutations", type=int, default=config.DEFAULT_PERMUTATIONS, help="Bucket permutations per label")
    bench.add_argument("--jobs", type=int, default=config.N_JOBS, help="Parallel tasks (joblib n_jobs)")
    bench.add_argument("--bucket-count", type=int, default=config.BUCKET_COUNT)
    bench.add_argument("--bucket-size", type=int, default=config.BUCKET_SIZE)
    bench.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    _add_mnist_paths(bench)

    verify = sub.add_parser("verify", parents=[common], help="Certificate checks on a synthetic separable stream")
    _add_synthetic(verify)
    verify.add_argument("--mnist-label", type=int, default=None, help="Also check NAROMMA/Aggressive ROMMA equivalence on this MNIST label")
    verify.add_argument("--bucket-count", type=int, default=config.BUCKET_COUNT)
    verify.add_argument("--bucket-size", type=int, default=config.BUCKET_SIZE)
    verify.add_argument("--corrupt-ell-at", type=int, default=None, help=argparse.SUPPRESS)
    verify.add_argument("--out", default=None, help="Report path (stdout when omitted)")
    _add_mnist_paths(verify, test=False)

    trace = sub.add_parser("trace", parents=[common], help="Per-trial trace of one classifier -> CSV")
    trace.add_argument("--algorithm", default="mcp", help=f"One of {', '.join(config.ALGORITHMS)}")
    trace.add_argument("--source", default="synthetic", choices=["synthetic", "mnist"])
    trace.add_argument("--label", type=int, default=0, help="Digit for --source mnist")
    trace.add_argument("--limit", type=int, default=100, help="Number of trials to emit (>= 1)")
    trace.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    _add_synthetic(trace)
    _add_mnist_paths(trace, test=False)

    return parser


# ── Commands ──────────────────────────────────────────────────

def cmd_bench(args) -> int:
    cfg = ExperimentConfig(
        algorithms=args.algorithm,
        labels=args.labels,
        permutations=args.permutations,
        seed=args.seed,
        train_images=args.train_images,
        train_labels=args.train_labels,
        test_images=args.test_images,
        test_labels=args.test_labels,
        out=args.out,
        n_jobs=args.jobs,
        bucket_count=args.bucket_count,
        bucket_size=args.bucket_size,
    )
    rows = run_benchmark(cfg)
    text = write_results_csv(rows, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    print(generate_text_summary(rows), file=sys.stderr)
    wins, compared = ordering_count(rows)
    logger.info("ordering: MCP best-or-equal on %d of %d labels", wins, compared)
    return config.EXIT_OK


def _synthetic(args) -> SyntheticConfig:
    return SyntheticConfig(
        n=args.synthetic_n,
        dim=args.synthetic_dim,
        gamma=args.synthetic_gamma,
        radius=args.synthetic_radius,
        seed=args.seed,
    )


def cmd_verify(args) -> int:
    mnist = None
    if args.mnist_label is not None:
        mnist = ExperimentConfig(
            labels=[args.mnist_label],
            seed=args.seed,
            train_images=args.train_images,
            train_labels=args.train_labels,
            bucket_count=args.bucket_count,
            bucket_size=args.bucket_size,
        )
    report = run_verification(_synthetic(args), corrupt_ell_at=args.corrupt_ell_at,
                              mnist_label=args.mnist_label, mnist=mnist)
    text = report.to_text() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return config.EXIT_OK if report.passed else config.EXIT_VERIFY_FAILED


def cmd_trace(args) -> int:
    cfg = TraceConfig(
        algorithm=args.algorithm,
        source=args.source,
        label=args.label,
        limit=args.limit,
        seed=args.seed,
        synthetic=_synthetic(args),
        train_images=args.train_images,
        train_labels=args.train_labels,
        out=args.out,
    )
    summary = run_trace(cfg)
    text = write_trace_csv(summary, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    return config.EXIT_OK


COMMANDS = {
    "bench":  cmd_bench,
    "verify": cmd_verify,
    "trace":  cmd_trace,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        logging.basicConfig(
            level=str(args.log_level).upper(),
            format=config.LOG_FORMAT,
            stream=sys.stderr,
            force=True,
        )
        return COMMANDS[args.command](args)
    except ValidationError as e:
        logger.error("invalid configuration:\n%s", e)
        return config.EXIT_USAGE
    except (GeneratorParameterError, FileNotFoundError) as e:
        logger.error("%s", e)
        return config.EXIT_USAGE
    except DataError as e:
        logger.error("data format error: %s", e)
        return config.EXIT_DATA_FORMAT
    except ValueError as e:
        logger.error("%s", e)
        return config.EXIT_USAGE
    except StateError as e:
        logger.error("classifier state error: %s", e)
        return config.EXIT_STATE
    except McfError as e:
        logger.error("%s", e)
        return config.EXIT_STATE


if __name__ == "__main__":
    sys.exit(main())
