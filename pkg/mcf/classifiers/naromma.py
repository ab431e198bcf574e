"""
naromma — the cosine-framework form of Aggressive ROMMA.

Each trial maximises the local cosine bound exactly. With
gamma_i = y_i (w_i . a_i) / ||w_i|| and ell = ell_i*:

  I    gamma_i >= 1/ell                    keep w_i
  II   1/ell > gamma_i >= ||a_i||^2 ell     w_{i+1} = y_i a_i,  ell = 1/||a_i||
  III  otherwise                           lambda_i = (1 - ell gamma_i) ||w_i|| / (ell ||a_i||^2 - gamma_i)
                                           ell^2 += (ell gamma_i - 1)^2 / (||a_i||^2 - gamma_i^2)

Examples linearly dependent on w_i cannot change its direction and are skipped.
"""

import math

from mcf import config
from mcf.classifiers._common import (
    DEPENDENT, ZERO_NORM, finish, init_with_example, is_dependent, predict_and_margin,
    require_initialized, require_nonzero, skip,
)
from mcf.errors import StateError
from mcf.linalg import SparseVector
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

NAME = "naromma"


def naromma_init(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    return init_with_example(state, a, y)


def naromma_observe(state: HypothesisState, a: SparseVector, y: int) -> TrialOutcome:
    require_initialized(state, NAME)
    wa, predicted, margin, nsa = predict_and_margin(state, a, y)
    if nsa == 0.0:
        return skip(state, NAME, ZERO_NORM, predicted=predicted, margin=margin, y=y)

    require_nonzero(state, NAME)
    norm_w = state.norm_w
    gamma_i = margin / norm_w
    if is_dependent(wa, state.norm_sq_w, nsa) or nsa - gamma_i * gamma_i <= config.TOLERANCES["dependence"] * nsa:
        return skip(state, NAME, DEPENDENT, predicted=predicted, margin=margin, y=y, gamma_i=gamma_i)

    ell = state.ell
    # I
    if gamma_i >= 1.0 / ell:
        return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y, gamma_i=gamma_i)

    # II
    if gamma_i >= nsa * ell:
        state.replace(a, float(y))
        state.ell = 1.0 / math.sqrt(nsa)
        return finish(state, UpdateKind.REPLACE, predicted=predicted, margin=margin, y=y,
                      lam=math.inf, gamma_i=gamma_i)

    # III
    den = ell * nsa - gamma_i
    if den <= 0:
        raise StateError(f"{NAME}: non-positive step denominator {den} at trial {state.trial_index}")
    lam = (1.0 - ell * gamma_i) * norm_w / den
    if lam <= 0:
        raise StateError(f"{NAME}: non-positive step {lam} at trial {state.trial_index}")

    state.apply_additive(lam, y, a)
    state.ell = math.sqrt(ell * ell + (ell * gamma_i - 1.0) ** 2 / (nsa - gamma_i * gamma_i))
    return finish(state, UpdateKind.ADDITIVE, predicted=predicted, margin=margin, y=y,
                  lam=lam, gamma_i=gamma_i)


ALGORITHM = {
    "name":      NAME,
    "label":     "NAROMMA",
    "framework": True,
    "keeps_ell": True,
    "init":      naromma_init,
    "observe":   naromma_observe,
}
