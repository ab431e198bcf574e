"""
aggressive_romma — Aggressive ROMMA in its original (c_i, d_i) form.

With m = y_i (u_i . a_i):

  I    m >= 1                       keep u_i
  II   1 > m >= ||a_i||^2 ||u_i||^2    u_{i+1} = (y_i / ||a_i||^2) a_i
  III  otherwise                    u_{i+1} = c_i u_i + d_i a_i,
         c_i = (||a_i||^2 ||u_i||^2 - m) / D,  d_i = ||u_i||^2 (y_i - u_i . a_i) / D,
         D   = ||a_i||^2 ||u_i||^2 - (u_i . a_i)^2

ell is recorded as ||u_i||; on a shared stream it tracks NAROMMA's certificate.
"""

import math

from mcf import config
from mcf.classifiers._common import (
    DEPENDENT, ZERO_NORM, example_norm_sq, finish, is_dependent, predict_and_margin,
    require_initialized, require_nonzero, skip,
)
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "aromma"


def aromma_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    """u_1 = (y_0 / ||a_0||^2) a_0."""
    nsa = example_norm_sq(a)
    state.replace(a, y / nsa)
    state.ell = state.norm_w
    state.initialized = True
    return finish(state, UpdateKind.INIT, predicted=None, margin=None, y=y, lam=1.0 / nsa)


def aromma_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    ua, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y)

    require_nonzero(state, NAME)
    nsu = state.norm_sq_w
    gamma_i = margin / state.norm_w
    den = nsa * nsu - ua * ua
    if is_dependent(ua, nsu, nsa) or den <= config.TOLERANCES["dependence"] * nsa * nsu:
        return skip(state, NAME, DEPENDENT, predicted=predicted, margin=margin, y=y, gamma_i=gamma_i)

    if margin >= 1.0:
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y, gamma_i=gamma_i)

    if margin >= nsa * nsu:
        state.replace(a, y / nsa)
        state.ell = state.norm_w
        return finish(state, UpdateKind.REPLACE, predicted=predicted, margin=margin, y=y,
                      lam=math.inf, gamma_i=gamma_i)

    c = (nsa * nsu - margin) / den
    d = nsu * (y - ua) / den
    state.apply_scaled(c, d, a)
    state.ell = state.norm_w
    # step of the equivalent form u + lambda y a, up to the positive factor c
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y,
                  lam=y * d / c, gamma_i=gamma_i)


ALGORITHM = {
    "name":      NAME,
    "label":     "Aggressive ROMMA",
    "framework": False,
    "keeps_ell": True,
    "init":      aromma_init,
    "observe":   aromma_observe,
}
