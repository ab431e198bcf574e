"""
perceptron — the classical conservative baseline.

  w_{i+1} = w_i + y_i a_i   when y_i (w_i . a_i) <= 0
"""

from mcf.classifiers._common import (
    ZERO_NORM, finish, init_with_example, predict_and_margin, require_initialized, skip,
)
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "perceptron"


def perceptron_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    return init_with_example(state, a, y)


def perceptron_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    _wa, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y)

    if margin > 0:
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y)

    state.apply_additive(1.0, y, a)
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y, lam=1.0)


ALGORITHM = {
    "name":      NAME,
    "label":     "Perceptron",
    "framework": False,
    "keeps_ell": False,
    "init":      perceptron_init,
    "observe":   perceptron_observe,
}
