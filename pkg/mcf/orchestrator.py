"""
MCF Orchestrator — central engine that runs the benchmark, verification and trace jobs.

Usage:
    from mcf.orchestrator import run_benchmark
    rows = run_benchmark(ExperimentConfig(algorithms=["mcp", "pa"], labels=[0], permutations=1))
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from mcf import config
from mcf.certificate import VerificationReport, check_equivalence, verify_run
from mcf.classifiers import OnlineClassifier, run_stream
from mcf.data import (
    BucketPermutationPlan, Dataset, derive_task_seed, load_idx, permuted_stream,
    relabel_one_vs_rest, synthesize_separable,
)
from mcf.errors import DataError, StateError
from mcf.models import ExperimentConfig, ResultRow, RunSummary, SyntheticConfig, TraceConfig

logger = logging.getLogger(__name__)


# ── Benchmark ─────────────────────────────────────────────────

def run_task(label: int, permutation_index: int, algorithms: Sequence[str],
             train: Dataset, test: Dataset, master_seed: int,
             bucket_count: int = config.BUCKET_COUNT,
             bucket_size: int = config.BUCKET_SIZE) -> List[ResultRow]:
    """One (label, permutation) task: every algorithm sees the same permuted stream."""
    seed = derive_task_seed(master_seed, label, permutation_index)
    plan = BucketPermutationPlan.from_seed(seed, bucket_count, bucket_size)
    train_l = relabel_one_vs_rest(train, label)
    test_l = relabel_one_vs_rest(test, label)

    rows = []
    for name in algorithms:
        clf = OnlineClassifier(name, train.dim)
        summary = run_stream(clf, permuted_stream(train_l, plan), keep_outcomes=False)
        if summary.observed != len(train_l):
            raise StateError(
                f"{name}: single pass observed {summary.observed} of {len(train_l)} training examples"
            )

        # frozen hypothesis
        predictions = clf.predict_batch(test_l.matrix)
        test_mistakes = int(np.count_nonzero(predictions != test_l.labels))
        rows.append(ResultRow(
            algorithm=name,
            label=label,
            permutation_index=permutation_index,
            seed=seed,
            train_updates=summary.updates,
            train_mistakes=summary.mistakes,
            test_mistakes=test_mistakes,
            test_error_rate=test_mistakes / len(test_l),
        ))
        logger.debug("label %d perm %d %s: %d train mistakes, %d test mistakes",
                     label, permutation_index, name, summary.mistakes, test_mistakes)
    return rows


def load_mnist(cfg: ExperimentConfig):
    train = load_idx(cfg.train_images, cfg.train_labels, split="train")
    test = load_idx(cfg.test_images, cfg.test_labels, split="test")
    return train, test


def run_benchmark(cfg: ExperimentConfig, train: Optional[Dataset] = None,
                  test: Optional[Dataset] = None) -> List[ResultRow]:
    """Fan the (label x permutation) tasks out with joblib and return the sorted rows."""
    if train is None or test is None:
        train, test = load_mnist(cfg)
    expected = cfg.bucket_count * cfg.bucket_size
    if len(train) != expected:
        raise DataError(
            f"training set has {len(train)} examples, protocol needs "
            f"{cfg.bucket_count} buckets x {cfg.bucket_size} = {expected}"
        )

    tasks = [(label, p) for label in cfg.labels for p in range(cfg.permutations)]
    logger.info("bench: %d tasks x %d algorithms, n_jobs=%d", len(tasks), len(cfg.algorithms), cfg.n_jobs)

    results = Parallel(n_jobs=cfg.n_jobs)(
        delayed(run_task)(label, p, cfg.algorithms, train, test, cfg.seed,
                          cfg.bucket_count, cfg.bucket_size)
        for label, p in tasks
    )
    rows = [row for task_rows in results for row in task_rows]
    rows.sort(key=ResultRow.sort_key)
    return rows


# ── Verification ──────────────────────────────────────────────

def _corrupt_ell(summary: RunSummary, trial: int, factor: float = 1.5):
    for outcome in summary.outcomes:
        if outcome.trial == trial:
            outcome.ell_after *= factor
            logger.info("%s: ell at trial %d scaled by %g", summary.algorithm, trial, factor)
            return
    raise ValueError(f"{summary.algorithm}: no trial {trial} to corrupt")


def run_verification(cfg: SyntheticConfig, corrupt_ell_at: Optional[int] = None,
                     mnist_label: Optional[int] = None,
                     mnist: Optional[ExperimentConfig] = None) -> VerificationReport:
    """Synthesize a separable stream, run every framework classifier on it and verify them."""
    dataset, target = synthesize_separable(cfg.n, cfg.dim, cfg.gamma, cfg.radius, cfg.seed)
    examples = list(dataset)
    report = VerificationReport(n=len(dataset), dim=dataset.dim, gamma=target.gamma, radius=target.radius)

    for name in config.FRAMEWORK_ALGORITHMS:
        clf = OnlineClassifier(name, dataset.dim)
        summary = run_stream(clf, examples)
        if corrupt_ell_at is not None:
            _corrupt_ell(summary, corrupt_ell_at)
        report.runs.append(verify_run(target, examples, summary))

    report.equivalence.append(check_equivalence(examples))

    if mnist_label is not None:
        mnist = mnist or ExperimentConfig()
        train = load_idx(mnist.train_images, mnist.train_labels, split="train")
        train = relabel_one_vs_rest(train, mnist_label)
        seed = derive_task_seed(mnist.seed, mnist_label, 0)
        plan = BucketPermutationPlan.from_seed(seed, mnist.bucket_count, mnist.bucket_size)
        report.equivalence.append(check_equivalence(list(permuted_stream(train, plan))))

    logger.info("verification %s: %d failures", "passed" if report.passed else "FAILED", len(report.failures))
    return report


# ── Trace ─────────────────────────────────────────────────────

def run_trace(cfg: TraceConfig) -> RunSummary:
    """The first `limit` outcomes of one classifier on a synthetic or MNIST stream."""
    if cfg.source == "synthetic":
        s = cfg.synthetic
        dataset, _target = synthesize_separable(s.n, s.dim, s.gamma, s.radius, s.seed)
        stream = iter(dataset)
    else:
        dataset = relabel_one_vs_rest(load_idx(cfg.train_images, cfg.train_labels), cfg.label)
        plan = BucketPermutationPlan.from_seed(derive_task_seed(cfg.seed, cfg.label, 0))
        stream = permuted_stream(dataset, plan)

    clf = OnlineClassifier(cfg.algorithm, dataset.dim)
    return run_stream(clf, stream, limit=cfg.limit)
