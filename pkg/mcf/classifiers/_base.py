"""
Online classifier contract and the single-pass stream driver.

Usage:
    clf = OnlineClassifier("mcp", dim=784)
    summary = run_stream(clf, stream)
    scores = clf.margins(test_matrix)
"""

import logging
from typing import Iterable, Optional

import numpy as np

from mcf.classifiers._common import sign
from mcf.classifiers._registry import get_algorithm
from mcf.errors import DataError, StateError
from mcf.linalg import SparseVector, dot, norm_sq
from mcf.models import HypothesisState, LabeledExample, RunSummary, TrialOutcome

logger = logging.getLogger(__name__)


class OnlineClassifier:
    """A registered algorithm bound to its own HypothesisState."""

    def __init__(self, name: str, dim: int):
        entry = get_algorithm(name)
        self.name = name
        self.label = entry["label"]
        self.framework = entry["framework"]
        self._init = entry["init"]
        self._observe = entry["observe"]
        self.state = HypothesisState.empty(dim)

    @property
    def dim(self) -> int:
        return self.state.dim

    @property
    def initialized(self) -> bool:
        return self.state.initialized

    def initialize(self, a: SparseVector, y: int) -> TrialOutcome:
        if self.state.initialized:
            raise StateError(f"{self.name}: already initialised")
        return self._init(self.state, a, y)

    def predict(self, a: SparseVector) -> int:
        if not self.state.initialized:
            raise StateError(f"{self.name}: run initialize first")
        return sign(dot(self.state.w, a))

    def observe(self, a: SparseVector, y: int) -> TrialOutcome:
        return self._observe(self.state, a, y)

    def margins(self, matrix) -> np.ndarray:
        """Raw scores w . a for every row of a (CSR) matrix."""
        if matrix.shape[1] != self.dim:
            raise DataError(f"matrix has {matrix.shape[1]} columns, classifier has dim {self.dim}")
        return np.asarray(matrix @ self.state.w.values).ravel()

    def predict_batch(self, matrix) -> np.ndarray:
        return np.where(self.margins(matrix) >= 0, 1, -1)

    def __repr__(self):
        return f"OnlineClassifier({self.name!r}, dim={self.dim}, trial={self.state.trial_index})"


def run_stream(classifier: OnlineClassifier, stream: Iterable[LabeledExample],
               keep_outcomes: bool = True, limit: Optional[int] = None) -> RunSummary:
    """One pass over `stream`: the first non-zero example initialises, the rest are trials.

    Leading zero-norm examples are skipped before initialisation. `limit` stops
    after that many outcomes (used by trace export).
    """
    summary = RunSummary(algorithm=classifier.name, keep_outcomes=keep_outcomes)
    recorded = 0

    for example in stream:
        if limit is not None and recorded >= limit:
            break
        summary.observed += 1
        if not classifier.initialized:
            if norm_sq(example.a) == 0.0:
                logger.warning("%s: zero-norm example %d skipped before initialisation",
                               classifier.name, summary.observed - 1)
                summary.skipped += 1
                continue
            summary.record(classifier.initialize(example.a, example.y))
        else:
            summary.record(classifier.observe(example.a, example.y))
        recorded += 1

    if not classifier.initialized:
        raise DataError(f"{classifier.name}: stream held no example with non-zero norm "
                        f"({summary.observed} observed)")

    summary.state = classifier.state
    logger.debug("%s: %d observed, %d mistakes, %d updates",
                 classifier.name, summary.observed, summary.mistakes, summary.updates)
    return summary
