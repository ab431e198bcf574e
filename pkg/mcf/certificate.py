"""
certificate — target-aware verification of the cosine certificates.

Given a separating unit vector w with margin gamma and radius R, a run of a
framework classifier (MCP, CMCP, NAROMMA) is replayed from its recorded
updates and checked trial by trial:

  certificate      alpha_i = (w . w_i)/||w_i|| >= gamma * ell_i
  recurrence       alpha_{i+1} >= (alpha_i + gamma x)/sqrt(1 + ||a||^2 x^2 + 2 gamma_i x),  x = lambda/||w_i||
  ell              reported ell equals an independent recomputation
  step             reported lambda equals the update rule's lambda
  optimizer        NAROMMA's ell equals the closed-form maximum of the local bound
  no-update margin MCP declines to update only when gamma_i >= gamma/2
  norm             cached ||w_i||^2 equals the from-scratch norm
  mistake bound    mistakes <= (R/gamma)^2

check_equivalence runs NAROMMA and Aggressive ROMMA in lockstep and compares
update types, hypothesis directions and ||u_i|| against ell_i*.
"""

import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from mcf import config
from mcf.cosine_optimizer import ShiftedRatioProblem, maximize_shifted
from mcf.errors import DataError
from mcf.linalg import DenseVector, SparseVector, cosine, dot, norm_sq
from mcf.models import LabeledExample, RunSummary, UpdateKind

logger = logging.getLogger(__name__)


# ── Target ────────────────────────────────────────────────────

@dataclass
class KnownTarget:
    """Unit separator w with the realised margin gamma and radius R of its example set."""
    w: DenseVector
    gamma: float
    radius: float

    def __post_init__(self):
        norm = math.sqrt(self.w.norm_sq())
        if abs(norm - 1.0) > config.TOLERANCES["unit_target"]:
            raise ValueError(f"target must have unit norm, got {norm!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.w.dim

    @property
    def mistake_bound(self) -> float:
        return (self.radius / self.gamma) ** 2

    def alpha(self, w_i: np.ndarray) -> float:
        """Cosine between the target and a hypothesis."""
        n = float(np.linalg.norm(w_i))
        if n == 0.0:
            return math.nan
        return float(np.dot(self.w.values, w_i)) / n

    def check_examples(self, examples: Iterable[LabeledExample]):
        """Raise DataError at the first example violating the margin or radius."""
        for k, ex in enumerate(examples):
            wa = dot(self.w, ex.a)
            if ex.y * wa < self.gamma:
                raise DataError(
                    f"example {k} violates the margin: y(w.a) = {ex.y * wa!r} < gamma = {self.gamma!r}"
                )
            if math.sqrt(norm_sq(ex.a)) > self.radius:
                raise DataError(
                    f"example {k} exceeds the radius: ||a|| = {math.sqrt(norm_sq(ex.a))!r} > R = {self.radius!r}"
                )


# ── Records ───────────────────────────────────────────────────

@dataclass
class TrialCertificate:
    trial: int
    alpha: float
    ell: float
    delta: float            # alpha / gamma; delta >= ell is the certificate
    mistakes: int


@dataclass
class CertificateTrace:
    records: List[TrialCertificate] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def min_slack(self) -> float:
        """min over trials of delta_i - ell_i."""
        if not self.records:
            return math.inf
        return min(r.delta - r.ell for r in self.records)


@dataclass
class RecurrenceRecord:
    """Quantities of one additive update needed by the one-step cosine recurrence."""
    trial: int
    alpha_before: float
    alpha_after: float
    gamma: float
    lam: float
    norm_w_before: float
    norm_sq_a: float
    gamma_i: float

    @property
    def x(self) -> float:
        return self.lam / self.norm_w_before

    @property
    def bound(self) -> float:
        x = self.x
        return (self.alpha_before + self.gamma * x) / math.sqrt(
            1.0 + self.norm_sq_a * x * x + 2.0 * self.gamma_i * x
        )


def recurrence_check(record: RecurrenceRecord, tol: Optional[float] = None) -> bool:
    """alpha_{i+1} >= the one-step lower bound, within tolerance."""
    tol = config.TOLERANCES["certificate"] if tol is None else tol
    if record.lam == 0.0:
        return abs(record.alpha_after - record.alpha_before) <= tol
    return record.alpha_after >= record.bound - tol


@dataclass
class VerificationFailure:
    algorithm: str
    trial: int
    check: str
    detail: str

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class RunVerification:
    """Outcome of verify_run for one classifier."""
    algorithm: str
    trials: int
    mistakes: int
    mistake_bound: float
    trace: CertificateTrace
    recurrences_checked: int = 0
    failures: List[VerificationFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, trial: int, check: str, detail: str):
        self.failures.append(VerificationFailure(self.algorithm, trial, check, detail))
        logger.warning("%s trial %d: %s failed (%s)", self.algorithm, trial, check, detail)


@dataclass
class EquivalenceReport:
    trials: int = 0
    max_angle_deviation: float = 0.0        # max 1 - cos(v_i, u_i)
    max_norm_rel_deviation: float = 0.0     # max | ||u_i|| - ell_i* | / ell_i*
    kinds: Dict[str, int] = field(default_factory=dict)
    failures: List[VerificationFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class VerificationReport:
    n: int
    dim: int
    gamma: float
    radius: float
    runs: List[RunVerification] = field(default_factory=list)
    equivalence: List[EquivalenceReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.runs) and all(e.passed for e in self.equivalence)

    @property
    def failures(self) -> List[VerificationFailure]:
        out = [f for r in self.runs for f in r.failures]
        out += [f for e in self.equivalence for f in e.failures]
        return out

    def to_text(self) -> str:
        from mcf.report_engine import generate_verification_report
        return generate_verification_report(self)


# ── Replay ────────────────────────────────────────────────────

def _rel_close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


def _recompute_ell(algorithm: str, kind: UpdateKind, ell: float, margin: float,
                   norm_w: float, nsa: float) -> float:
    if kind is UpdateKind.NONE:
        return ell
    if kind is UpdateKind.REPLACE:
        return 1.0 / math.sqrt(nsa)
    if algorithm == "cmcp":
        return math.sqrt(ell * ell + 1.0 / nsa)
    if algorithm == "mcp":
        eta = 0.0 if margin <= 0 else margin * ell / norm_w
        return math.sqrt(ell * ell + (1.0 - 2.0 * eta) / nsa)
    gamma_i = margin / norm_w
    return math.sqrt(ell * ell + (ell * gamma_i - 1.0) ** 2 / (nsa - gamma_i * gamma_i))


def _recompute_step(algorithm: str, kind: UpdateKind, ell: float, margin: float,
                    norm_w: float, nsa: float) -> Tuple[float, float]:
    """(lambda the update rule prescribes, condition factor for its tolerance)."""
    if kind is UpdateKind.NONE:
        return 0.0, 1.0
    if kind is UpdateKind.REPLACE:
        return math.inf, 1.0
    if algorithm in ("cmcp", "mcp"):
        return norm_w / (ell * nsa), 1.0
    gamma_i = margin / norm_w
    den = ell * nsa - gamma_i
    # den -> 0 at the replace boundary
    return (1.0 - ell * gamma_i) * norm_w / den, max(1.0, ell * nsa / abs(den))


def _usable(examples: Sequence[LabeledExample]):
    """Drop the leading zero-norm examples run_stream skips before initialisation."""
    k = 0
    while k < len(examples) and norm_sq(examples[k].a) == 0.0:
        k += 1
    return examples[k:]


def verify_run(target: KnownTarget, examples: Sequence[LabeledExample], summary: RunSummary) -> RunVerification:
    """Replay a framework classifier's run and check every certificate claim."""
    algorithm = summary.algorithm
    if algorithm not in config.FRAMEWORK_ALGORITHMS:
        raise ValueError(f"verify_run needs one of {config.FRAMEWORK_ALGORITHMS}, got {algorithm!r}")
    if not summary.outcomes:
        raise ValueError("verify_run needs a summary recorded with keep_outcomes=True")
    target.check_examples(examples)

    tol = config.TOLERANCES["certificate"]
    ell_rel = config.TOLERANCES["ell_match_rel"]
    step_rel = config.TOLERANCES["step_rel"]
    norm_rel = config.TOLERANCES["norm_drift_rel"]
    gamma = target.gamma

    stream = _usable(examples)
    result = RunVerification(algorithm, summary.trials, 0, target.mistake_bound, CertificateTrace())
    w = np.zeros(target.dim, dtype=np.float64)
    ell = 0.0
    mistakes = 0

    for ex, outcome in zip(stream, summary.outcomes):
        a, y = ex.a, ex.y
        nsa = norm_sq(a)
        trial = outcome.trial
        kind = outcome.update_kind

        if kind is UpdateKind.INIT:
            if outcome.lam != 1.0:
                result.fail(trial, "step", f"init lambda {outcome.lam!r}, expected 1.0")
            w[a.indices] = outcome.lam * y * a.values
            ell = 1.0 / math.sqrt(nsa)
        else:
            norm_w = float(np.linalg.norm(w))
            if norm_w == 0.0:
                result.fail(trial, "degenerate", "hypothesis is the zero vector")
                break
            wa = float(np.dot(w[a.indices], a.values))
            margin = y * wa
            if outcome.margin is not None and abs(outcome.margin - margin) > ell_rel * (norm_w * math.sqrt(nsa)):
                result.fail(trial, "replay", f"margin {outcome.margin!r} vs recomputed {margin!r}")
            if (1 if wa >= 0 else -1) != y:
                mistakes += 1

            if algorithm == "mcp" and kind is UpdateKind.NONE and not outcome.skipped:
                if margin / norm_w < gamma / 2.0 - tol:
                    result.fail(trial, "no_update_margin",
                                f"gamma_i = {margin / norm_w!r} < gamma/2 = {gamma / 2.0!r} without an update")

            alpha_before = target.alpha(w)
            new_ell = _recompute_ell(algorithm, kind, ell, margin, norm_w, nsa)
            lam, condition = _recompute_step(algorithm, kind, ell, margin, norm_w, nsa)
            if not (outcome.lam == lam or _rel_close(outcome.lam, lam, step_rel * condition)):
                result.fail(trial, "step", f"reported lambda {outcome.lam!r}, recomputed {lam!r}")

            if kind is UpdateKind.ADDITIVE:
                w[a.indices] += outcome.lam * y * a.values
                rec = RecurrenceRecord(trial, alpha_before, target.alpha(w), gamma,
                                       outcome.lam, norm_w, nsa, margin / norm_w)
                result.recurrences_checked += 1
                if not recurrence_check(rec, tol):
                    result.fail(trial, "recurrence",
                                f"alpha_after = {rec.alpha_after!r} < bound {rec.bound!r}")
                if algorithm == "naromma":
                    optimum = maximize_shifted(
                        ShiftedRatioProblem(ell, 1.0, 1.0, nsa, (margin / norm_w) / nsa)
                    ).value
                    if not _rel_close(optimum, new_ell, ell_rel):
                        result.fail(trial, "optimizer", f"ell {new_ell!r} vs bound maximum {optimum!r}")
            elif kind is UpdateKind.REPLACE:
                w[:] = 0.0
                w[a.indices] = y * a.values
            ell = new_ell

        if not _rel_close(outcome.ell_after, ell, ell_rel):
            result.fail(trial, "ell_mismatch", f"reported {outcome.ell_after!r}, recomputed {ell!r}")

        scratch = float(np.dot(w, w))
        if not _rel_close(outcome.norm_sq_w_after, scratch, norm_rel):
            result.fail(trial, "norm", f"cached {outcome.norm_sq_w_after!r}, from scratch {scratch!r}")

        alpha = target.alpha(w)
        if math.isnan(alpha):
            result.fail(trial, "degenerate", "hypothesis is the zero vector")
            break
        if alpha < gamma * outcome.ell_after - tol:
            result.fail(trial, "certificate",
                        f"alpha = {alpha!r} < gamma * ell = {gamma * outcome.ell_after!r}")
        result.trace.records.append(
            TrialCertificate(trial, alpha, outcome.ell_after, alpha / gamma, mistakes)
        )

    result.mistakes = mistakes
    if mistakes > target.mistake_bound:
        result.fail(summary.outcomes[-1].trial, "mistake_bound",
                    f"{mistakes} mistakes > (R/gamma)^2 = {target.mistake_bound!r}")
    logger.info("%s: %d trials verified, %d failures", algorithm, len(result.trace), len(result.failures))
    return result


# ── Equivalence ───────────────────────────────────────────────

def check_equivalence(examples: Sequence[LabeledExample], tol: Optional[float] = None) -> EquivalenceReport:
    """Run NAROMMA and Aggressive ROMMA in lockstep and compare them after every trial."""
    from mcf.classifiers import OnlineClassifier

    tol = config.TOLERANCES["equivalence"] if tol is None else tol
    stream = _usable(examples)
    if not stream:
        raise DataError("equivalence check needs at least one non-zero example")
    dim = stream[0].a.dim
    narom = OnlineClassifier("naromma", dim)
    arom = OnlineClassifier("aromma", dim)
    report = EquivalenceReport(kinds={k.value: 0 for k in UpdateKind})
    name = "naromma~aromma"

    for k, ex in enumerate(stream):
        if k == 0:
            ov, ou = narom.initialize(ex.a, ex.y), arom.initialize(ex.a, ex.y)
        else:
            ov, ou = narom.observe(ex.a, ex.y), arom.observe(ex.a, ex.y)
        report.trials += 1
        report.kinds[ov.update_kind.value] += 1

        if ov.update_kind is not ou.update_kind or ov.skipped != ou.skipped:
            report.failures.append(VerificationFailure(
                name, ov.trial, "update_kind", f"{ov.update_kind.value} vs {ou.update_kind.value}"))

        cos = cosine(narom.state.w, arom.state.w)
        deviation = 1.0 - cos
        report.max_angle_deviation = max(report.max_angle_deviation, deviation)
        if deviation > tol:
            report.failures.append(VerificationFailure(name, ov.trial, "direction", f"cos = {cos!r}"))

        ell_star = narom.state.ell
        rel = abs(arom.state.norm_w - ell_star) / ell_star
        report.max_norm_rel_deviation = max(report.max_norm_rel_deviation, rel)
        if rel > tol:
            report.failures.append(VerificationFailure(
                name, ov.trial, "norm", f"||u|| = {arom.state.norm_w!r}, ell* = {ell_star!r}"))

    logger.info("equivalence: %d trials, max 1-cos %.3e, %d failures",
                report.trials, report.max_angle_deviation, len(report.failures))
    return report
