"""
Central configuration for the Maximum Cosine Framework bench.

Values may be overridden from a local .env file (see README).
"""

import os

from dotenv import load_dotenv

load_dotenv()

# ── Application ───────────────────────────────────────────────
APP_TITLE = "MCF — Maximum Cosine Framework online classifier bench"
APP_VERSION = "0.1.0"
LOG_LEVEL = os.getenv("MCF_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# ── Numerical tolerances ──────────────────────────────────────
TOLERANCES = {
    "dependence":      1e-12,   # |cos(w, a)| >= 1 - tol counts as linearly dependent
    "certificate":     1e-9,    # alpha_i >= gamma * ell_i - tol
    "ell_match_rel":   1e-9,    # reported vs recomputed ell
    "step_rel":        1e-8,    # reported vs recomputed lambda, times its condition factor
    "equivalence":     1e-9,    # NAROMMA vs Aggressive ROMMA cosine / norm
    "unit_target":     1e-12,   # | ||w|| - 1 |
    "norm_drift_rel":  1e-9,    # cached ||w||^2 vs from-scratch
}

# Cached ||w||^2 is recomputed from scratch after this many additive updates.
NORM_RECOMPUTE_EVERY = 1024

# ── Algorithms ────────────────────────────────────────────────
ALGORITHMS = ("mcp", "cmcp", "naromma", "aromma", "perceptron", "pa")
# Classifiers carrying a cosine certificate ell_i.
FRAMEWORK_ALGORITHMS = ("mcp", "cmcp", "naromma")

# ── MNIST / IDX ───────────────────────────────────────────────
IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049
MNIST_SHAPE = (28, 28)
PIXEL_SCALE = 255.0
MNIST_LABELS = tuple(range(10))
MNIST_TRAIN_COUNT = 60000
MNIST_TEST_COUNT = 10000

MNIST_DIR = os.getenv("MCF_MNIST_DIR", os.path.join("data", "mnist"))
MNIST_FILES = {
    "train_images": os.path.join(MNIST_DIR, "train-images-idx3-ubyte"),
    "train_labels": os.path.join(MNIST_DIR, "train-labels-idx1-ubyte"),
    "test_images":  os.path.join(MNIST_DIR, "t10k-images-idx3-ubyte"),
    "test_labels":  os.path.join(MNIST_DIR, "t10k-labels-idx1-ubyte"),
}

# ── Experiment protocol ───────────────────────────────────────
BUCKET_COUNT = 60
BUCKET_SIZE = 1000
DEFAULT_PERMUTATIONS = 20
DEFAULT_SEED = int(os.getenv("MCF_SEED", "20170501"))
N_JOBS = int(os.getenv("MCF_N_JOBS", "1"))

# ── Synthetic generator ───────────────────────────────────────
SYNTHETIC_DEFAULTS = {
    "n":      1000,
    "dim":    20,
    "gamma":  0.1,
    "radius": 1.0,
}
GENERATOR_REJECT_WINDOW = 1_000_000     # draws
GENERATOR_MIN_ACCEPT_RATE = 1e-3        # below this over the window -> error

# ── CLI exit status ───────────────────────────────────────────
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA_FORMAT = 3
EXIT_STATE = 4
