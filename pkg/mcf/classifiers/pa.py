"""
pa — Passive-Aggressive baseline (unbounded hinge-loss step).

  lambda_i = max(0, 1 - y_i (w_i . a_i)) / ||a_i||^2

Starts from w = 0; the first example receives the PA step without a prediction.
"""

import math

from mcf.classifiers._common import (
    ZERO_NORM, example_norm_sq, finish, predict_and_margin, require_initialized, skip,
)
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "pa"


def hinge_step(margin: float, norm_sq_a: float) -> float:
    return max(0.0, 1.0 - margin) / norm_sq_a


def pa_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    nsa = example_norm_sq(a)
    lam = hinge_step(0.0, nsa)
    state.apply_additive(lam, y, a)
    state.ell = 1.0 / math.sqrt(nsa)
    state.initialized = True
    return finish(state, UpdateKind.INIT, predicted=None, margin=None, y=y, lam=lam)


def pa_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    _wa, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y)

    lam = hinge_step(margin, nsa)
    if lam <= 0.0:
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y)

    state.apply_additive(lam, y, a)
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y, lam=lam)


ALGORITHM = {
    "name":      NAME,
    "label":     "Passive-Aggressive",
    "framework": False,
    "keeps_ell": False,
    "init":      pa_init,
    "observe":   pa_observe,
}
