"""
Data models for the MCF bench.

  examples → classifier state → trial outcomes → run summaries → result rows

Dataclasses hold per-run state and records; pydantic models hold the validated
run configurations built by the CLI.
"""

import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Optional, List, Dict, Any, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from mcf import config
from mcf.linalg import SparseVector, DenseVector, axpy_update, scale_axpy_update


class UpdateKind(str, Enum):
    NONE = "None"
    REPLACE = "Replace"
    ADDITIVE = "Additive"
    INIT = "Init"


@dataclass(frozen=True)
class LabeledExample:
    a: SparseVector
    y: int

    def __post_init__(self):
        if self.y not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.y}")


@dataclass
class HypothesisState:
    """Weight vector, its cached squared norm, and the certificate ell."""
    w: DenseVector
    norm_sq_w: float = 0.0
    ell: float = 0.0
    initialized: bool = False
    trial_index: int = 0
    additive_updates: int = 0

    @classmethod
    def empty(cls, dim: int) -> "HypothesisState":
        return cls(w=DenseVector.zeros(dim))

    @property
    def dim(self) -> int:
        return self.w.dim

    @property
    def norm_w(self) -> float:
        return math.sqrt(self.norm_sq_w)

    def replace(self, a: SparseVector, scale: float):
        """w <- scale * a."""
        self.w = DenseVector(a.to_dense() * scale)
        self.norm_sq_w = self.w.norm_sq()

    def apply_additive(self, lam: float, y: int, a: SparseVector):
        """w <- w + lam*y*a with the cached-norm identity."""
        self.w, self.norm_sq_w = axpy_update(self.w, self.norm_sq_w, lam, y, a)
        self._count_additive()

    def apply_scaled(self, c: float, d: float, a: SparseVector):
        """w <- c*w + d*a with the cached-norm identity."""
        self.w, self.norm_sq_w = scale_axpy_update(self.w, self.norm_sq_w, c, d, a)
        self._count_additive()

    def _count_additive(self):
        self.additive_updates += 1
        if self.additive_updates % config.NORM_RECOMPUTE_EVERY == 0:
            self.refresh_norm()

    def refresh_norm(self):
        self.norm_sq_w = self.w.norm_sq()


@dataclass
class TrialOutcome:
    """One record per observed example."""
    trial: int
    predicted: Optional[int]            # None on the Init trial
    margin: Optional[float]             # y (w . a) before the update
    update_kind: UpdateKind
    lam: float = 0.0
    ell_after: float = 0.0
    gamma_i: Optional[float] = None     # NAROMMA / A-ROMMA
    eta_i: Optional[float] = None       # MCP
    mu_i: Optional[int] = None          # CMCP
    mistake: bool = False
    skipped: bool = False
    skip_reason: Optional[str] = None   # zero_norm | dependent
    norm_sq_w_after: float = 0.0


@dataclass
class RunSummary:
    """Everything a single pass of one classifier over one stream produced."""
    algorithm: str
    observed: int = 0
    trials: int = 0                     # predictions made; the Init example is excluded
    mistakes: int = 0
    updates: int = 0                    # Additive + Replace
    skipped: int = 0
    outcomes: List[TrialOutcome] = field(default_factory=list)
    state: Optional[HypothesisState] = None
    keep_outcomes: bool = True

    def record(self, outcome: TrialOutcome):
        if outcome.predicted is not None:
            self.trials += 1
        if outcome.mistake:
            self.mistakes += 1
        if outcome.skipped:
            self.skipped += 1
        if outcome.update_kind in (UpdateKind.ADDITIVE, UpdateKind.REPLACE):
            self.updates += 1
        if self.keep_outcomes:
            self.outcomes.append(outcome)

    def ell_sequence(self) -> np.ndarray:
        return np.array([o.ell_after for o in self.outcomes], dtype=np.float64)

    def count_by_kind(self) -> Dict[str, int]:
        counts = {k.value: 0 for k in UpdateKind}
        for o in self.outcomes:
            counts[o.update_kind.value] += 1
        return counts


@dataclass
class ResultRow:
    """One bench CSV row."""
    algorithm: str
    label: int
    permutation_index: Any              # int, or "avg" on average rows
    seed: Optional[int]
    train_updates: float
    train_mistakes: float
    test_mistakes: float
    test_error_rate: float

    def sort_key(self) -> Tuple:
        is_avg = self.permutation_index == "avg"
        return (is_avg, self.algorithm, self.label, -1 if is_avg else self.permutation_index)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ── Run configurations ────────────────────────────────────────

def _parse_csv_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


class ExperimentConfig(BaseModel):
    algorithms: List[str] = Field(default_factory=lambda: list(config.ALGORITHMS))
    labels: List[int] = Field(default_factory=lambda: list(config.MNIST_LABELS))
    permutations: int = Field(default=config.DEFAULT_PERMUTATIONS, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2 ** 64)
    train_images: str = config.MNIST_FILES["train_images"]
    train_labels: str = config.MNIST_FILES["train_labels"]
    test_images: str = config.MNIST_FILES["test_images"]
    test_labels: str = config.MNIST_FILES["test_labels"]
    out: Optional[str] = None
    n_jobs: int = config.N_JOBS
    bucket_count: int = Field(default=config.BUCKET_COUNT, ge=1)
    bucket_size: int = Field(default=config.BUCKET_SIZE, ge=1)

    @field_validator("algorithms", mode="before")
    @classmethod
    def _split_algorithms(cls, v):
        v = _parse_csv_list(v)
        if v == ["all"]:
            return list(config.ALGORITHMS)
        return v

    @field_validator("algorithms")
    @classmethod
    def _known_algorithms(cls, v):
        if not v:
            raise ValueError("at least one algorithm is required")
        unknown = [a for a in v if a not in config.ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; choose from {list(config.ALGORITHMS)}")
        return list(dict.fromkeys(v))

    @field_validator("labels", mode="before")
    @classmethod
    def _split_labels(cls, v):
        return _parse_csv_list(v)

    @field_validator("labels")
    @classmethod
    def _valid_labels(cls, v):
        if not v:
            raise ValueError("labels must be non-empty")
        bad = [x for x in v if x not in config.MNIST_LABELS]
        if bad:
            raise ValueError(f"labels must lie in 0..9, got {bad}")
        return sorted(set(v))


class SyntheticConfig(BaseModel):
    n: int = Field(default=config.SYNTHETIC_DEFAULTS["n"], ge=1)
    dim: int = Field(default=config.SYNTHETIC_DEFAULTS["dim"], ge=1)
    gamma: float = Field(default=config.SYNTHETIC_DEFAULTS["gamma"], gt=0)
    radius: float = Field(default=config.SYNTHETIC_DEFAULTS["radius"], gt=0)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2 ** 64)


class TraceConfig(BaseModel):
    algorithm: str = "mcp"
    source: str = "synthetic"
    label: int = Field(default=0, ge=0, le=9)
    limit: int = Field(default=100, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2 ** 64)
    synthetic: SyntheticConfig = Field(default_factory=SyntheticConfig)
    train_images: str = config.MNIST_FILES["train_images"]
    train_labels: str = config.MNIST_FILES["train_labels"]
    out: Optional[str] = None

    @model_validator(mode="after")
    def _check(self):
        if self.algorithm not in config.ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {list(config.ALGORITHMS)}")
        if self.source not in ("synthetic", "mnist"):
            raise ValueError(f"source must be 'synthetic' or 'mnist', got {self.source!r}")
        return self
