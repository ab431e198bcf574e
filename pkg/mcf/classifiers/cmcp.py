"""
cmcp — Conservative Maximum Cosine Perceptron.

Updates only on mistakes, with the step that maximises the local cosine bound
when gamma_i is replaced by its worst case 0:

  lambda_i  = ||w_i|| / (ell_i ||a_i||^2)
  ell_{i+1} = sqrt(ell_i^2 + 1/||a_i||^2)

The certificate alpha_i >= gamma * ell_i holds after every trial.
"""

import math

from mcf.classifiers._common import (
    ZERO_NORM, finish, init_with_example, predict_and_margin, require_initialized,
    require_nonzero, skip,
)
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "cmcp"


def cmcp_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    return init_with_example(state, a, y)


def cmcp_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    _wa, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y, mu_i=0)

    if margin > 0:
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y, mu_i=0)

    require_nonzero(state, NAME)
    lam = state.norm_w / (state.ell * nsa)
    state.apply_additive(lam, y, a)
    state.ell = math.sqrt(state.ell * state.ell + 1.0 / nsa)
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y, lam=lam, mu_i=1)


ALGORITHM = {
    "name":      NAME,
    "label":     "Conservative Maximum Cosine Perceptron",
    "framework": True,
    "keeps_ell": True,
    "init":      cmcp_init,
    "observe":   cmcp_observe,
}
