"""
cosine_optimizer — closed-form maximisers of the ratio functions behind every update rule.

Two families over the half-line x >= 0:

  simple:   phi(x) = (r + p x) / sqrt(s + q x^2)
  shifted:  phi(x) = (r + p x) / sqrt(s + q x^2 + 2 t q x)

The shifted maximiser branches on sign(r - p t) and sign(p s - r t q):

  case 1  r - pt = 0, p > 0          increasing          -> x = inf,  p/sqrt(q)
  case 2  r - pt = 0, p < 0          decreasing          -> x = 0,    r/sqrt(s)
  case 3  r - pt > 0, ps - rtq >= 0  interior maximum    -> x = (ps - rtq)/(rq - ptq)
  case 4  r - pt > 0, ps - rtq < 0   maximum left of 0   -> x = 0,    r/sqrt(s)
  case 5  r - pt < 0, ps - rtq >= 0  minimum left of 0   -> x = inf,  p/sqrt(q)
  case 6  r - pt < 0, ps - rtq < 0   interior minimum    -> larger end point (tie -> 0)

Case 0 (r - pt = 0 and p = 0) is the constant function r/sqrt(s).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from mcf.errors import InvalidProblemError


class Location(str, Enum):
    FINITE = "Finite"
    AT_ZERO = "AtZero"
    AT_INFINITY = "AtInfinity"


# ── Problem types ─────────────────────────────────────────────

@dataclass(frozen=True)
class SimpleRatioProblem:
    r: float
    p: float
    s: float
    q: float

    def validate(self):
        if not (self.s > 0):
            raise InvalidProblemError(f"s must be > 0, got {self.s}")
        if not (self.q > 0):
            raise InvalidProblemError(f"q must be > 0, got {self.q}")

    def evaluate(self, x):
        """phi(x) over scalars or arrays; x = inf gives the limit p/sqrt(q)."""
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(invalid="ignore", over="ignore"):
            out = (self.r + self.p * x) / np.sqrt(self.s + self.q * x * x)
        out = np.where(np.isinf(x), self.p / math.sqrt(self.q), out)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShiftedRatioProblem:
    r: float
    p: float
    s: float
    q: float
    t: float

    def validate(self):
        if not (self.q > 0):
            raise InvalidProblemError(f"q must be > 0, got {self.q}")
        if not (self.s > self.q * self.t * self.t):
            raise InvalidProblemError(
                f"s must exceed q*t^2 = {self.q * self.t * self.t}, got s={self.s}"
            )

    def evaluate(self, x):
        """phi(x) over scalars or arrays; x = inf gives the limit p/sqrt(q)."""
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(invalid="ignore", over="ignore"):
            den = np.sqrt(self.s + self.q * x * x + 2.0 * self.t * self.q * x)
            out = (self.r + self.p * x) / den
        out = np.where(np.isinf(x), self.p / math.sqrt(self.q), out)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OptimizerVerdict:
    location: Location
    value: float
    x_star: Optional[float] = None     # set only for FINITE

    def __post_init__(self):
        if self.location is Location.FINITE and (self.x_star is None or self.x_star < 0):
            raise ValueError(f"Finite verdict needs x_star >= 0, got {self.x_star}")


def _at_zero(r, s) -> OptimizerVerdict:
    return OptimizerVerdict(Location.AT_ZERO, r / math.sqrt(s))


def _at_infinity(p, q) -> OptimizerVerdict:
    return OptimizerVerdict(Location.AT_INFINITY, p / math.sqrt(q))


def _better_end(r, p, s, q) -> OptimizerVerdict:
    at_zero, at_inf = r / math.sqrt(s), p / math.sqrt(q)
    if at_inf > at_zero:
        return _at_infinity(p, q)
    return _at_zero(r, s)


# ── Maximisers ────────────────────────────────────────────────

def maximize_simple(problem: SimpleRatioProblem) -> OptimizerVerdict:
    """Supremum of (r + p x)/sqrt(s + q x^2) over x >= 0."""
    problem.validate()
    r, p, s, q = problem.r, problem.p, problem.s, problem.q

    if r > 0:
        x_star = (p * s) / (r * q)
        if x_star >= 0:
            return OptimizerVerdict(Location.FINITE, math.sqrt(r * r / s + p * p / q), x_star)
        # stationary maximum lies left of 0; phi decreases on the half-line
        return _at_zero(r, s)
    if r == 0:
        if p > 0:
            return _at_infinity(p, q)
        return _at_zero(r, s)
    # r < 0: the stationary point is a minimum
    return _better_end(r, p, s, q)


def shifted_case(problem: ShiftedRatioProblem) -> int:
    """Which branch of the shifted case analysis applies (0 for the constant function)."""
    r, p, s, q, t = problem.r, problem.p, problem.s, problem.q, problem.t
    lead = r - p * t
    cross = p * s - r * t * q
    if lead == 0:
        if p > 0:
            return 1
        if p < 0:
            return 2
        return 0
    if lead > 0:
        return 3 if cross >= 0 else 4
    return 5 if cross >= 0 else 6


def maximize_shifted(problem: ShiftedRatioProblem) -> OptimizerVerdict:
    """Supremum of (r + p x)/sqrt(s + q x^2 + 2 t q x) over x >= 0."""
    problem.validate()
    r, p, s, q, t = problem.r, problem.p, problem.s, problem.q, problem.t
    case = shifted_case(problem)

    if case in (1, 5):
        return _at_infinity(p, q)
    if case in (0, 2, 4):
        return _at_zero(r, s)
    if case == 3:
        lead = r - p * t
        x_star = (p * s - r * t * q) / (r * q - p * t * q)
        value = math.sqrt(lead * lead / (s - q * t * t) + p * p / q)
        return OptimizerVerdict(Location.FINITE, value, x_star)
    return _better_end(r, p, s, q)


def local_cosine_bound(ell: float, x, norm_sq_a: float, gamma_i: float):
    """(ell + x) / sqrt(1 + |a|^2 x^2 + 2 gamma_i x): the per-trial bound on alpha_{i+1}/gamma.

    Its maximum over x >= 0 is maximize_shifted(ShiftedRatioProblem(ell, 1, 1, |a|^2, gamma_i/|a|^2)).
    """
    return ShiftedRatioProblem(ell, 1.0, 1.0, norm_sq_a, gamma_i / norm_sq_a).evaluate(x)
