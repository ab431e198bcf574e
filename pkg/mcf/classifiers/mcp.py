"""
mcp — Maximum Cosine Perceptron.

Non-conservative: updates whenever y_i (w_i . a_i) <= ||w_i|| / (2 ell_i), that is,
also on correct predictions whose normalised margin is below 1/(2 ell_i).

  eta_i     = 0                              if y_i (w_i . a_i) <= 0
            = y_i (w_i . a_i) ell_i / ||w_i||  otherwise   (so 0 <= eta_i <= 1/2)
  lambda_i  = ||w_i|| / (ell_i ||a_i||^2)
  ell_{i+1} = sqrt(ell_i^2 + (1 - 2 eta_i) / ||a_i||^2)

Mistakes are bounded by (R/gamma)^2 on any stream separable with margin gamma.
"""

import math

from mcf.classifiers._common import (
    ZERO_NORM, finish, init_with_example, predict_and_margin, require_initialized,
    require_nonzero, skip,
)
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "mcp"


def mcp_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    return init_with_example(state, a, y)


def update_threshold(state: HypothesisState) -> float:
    """Margin at or below which MCP updates: ||w|| / (2 ell)."""
    return state.norm_w / (2.0 * state.ell)


def mcp_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    _wa, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y)

    if margin > update_threshold(state):
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y)

    require_nonzero(state, NAME)
    norm_w = state.norm_w
    eta = 0.0 if margin <= 0 else margin * state.ell / norm_w
    lam = norm_w / (state.ell * nsa)
    state.apply_additive(lam, y, a)
    state.ell = math.sqrt(state.ell * state.ell + (1.0 - 2.0 * eta) / nsa)
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y, lam=lam, eta_i=eta)


ALGORITHM = {
    "name":      NAME,
    "label":     "Maximum Cosine Perceptron",
    "framework": True,
    "keeps_ell": True,
    "init":      mcp_init,
    "observe":   mcp_observe,
}
