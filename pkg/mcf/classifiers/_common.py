"""Shared trial bookkeeping for the algorithm modules."""

import logging
import math
from typing import Optional

from mcf import config
from mcf.errors import DataError, StateError
from mcf.linalg import SparseVector, dot, norm_sq
from mcf.models import HypothesisState, TrialOutcome, UpdateKind

logger = logging.getLogger(__name__)

ZERO_NORM = "zero_norm"
DEPENDENT = "dependent"


def sign(value: float) -> int:
    """Prediction sign with sign(0) = +1."""
    return 1 if value >= 0 else -1


def require_initialized(state: HypothesisState, algorithm: str):
    if not state.initialized:
        raise StateError(f"{algorithm}: observe called before initialize")


def require_nonzero(state: HypothesisState, algorithm: str):
    if state.norm_sq_w <= 0.0:
        raise StateError(f"{algorithm}: hypothesis collapsed to the zero vector at trial {state.trial_index}")


def example_norm_sq(a: SparseVector) -> float:
    """||a||^2, refusing zero-norm examples at initialisation."""
    nsa = norm_sq(a)
    if nsa <= 0.0:
        raise DataError("cannot initialise from a zero-norm example")
    return nsa


def is_dependent(wa: float, norm_sq_w: float, norm_sq_a: float) -> bool:
    """|cos(w, a)| within the dependence tolerance of 1."""
    if norm_sq_w <= 0.0:
        return False
    cos = abs(wa) / math.sqrt(norm_sq_w * norm_sq_a)
    return cos >= 1.0 - config.TOLERANCES["dependence"]


def finish(state: HypothesisState, update_kind: UpdateKind, *, predicted: Optional[int],
           margin: Optional[float], y: int, lam: float = 0.0, **extra) -> TrialOutcome:
    """Stamp an outcome with the post-trial state and advance the trial counter."""
    outcome = TrialOutcome(
        trial=state.trial_index,
        predicted=predicted,
        margin=margin,
        update_kind=update_kind,
        lam=lam,
        ell_after=state.ell,
        mistake=predicted is not None and predicted != y,
        norm_sq_w_after=state.norm_sq_w,
        **extra,
    )
    state.trial_index += 1
    return outcome


def skip(state: HypothesisState, algorithm: str, reason: str, *,
         predicted: int, margin: float, y: int, **extra) -> TrialOutcome:
    """A predicted trial that leaves the hypothesis untouched."""
    logger.debug("%s: trial %d skipped (%s)", algorithm, state.trial_index, reason)
    return finish(state, UpdateKind.NONE, predicted=predicted, margin=margin, y=y,
                  skipped=True, skip_reason=reason, **extra)


def init_with_example(state: HypothesisState, a: SparseVector, y: int, scale: float = 1.0) -> TrialOutcome:
    """w_1 = scale * y * a_0, ell_1 = 1/||a_0||. Consumes the example without a prediction."""
    nsa = example_norm_sq(a)
    state.replace(a, scale * y)
    state.ell = 1.0 / math.sqrt(nsa)
    state.initialized = True
    return finish(state, UpdateKind.INIT, predicted=None, margin=None, y=y, lam=scale)


def predict_and_margin(state: HypothesisState, a: SparseVector, y: int):
    """(w . a, predicted label, signed margin y (w . a), ||a||^2)."""
    wa = dot(state.w, a)
    return wa, sign(wa), y * wa, norm_sq(a)
