"""
Online classifiers of the Maximum Cosine Framework and their baselines.

Algorithm modules register themselves through a module-level ALGORITHM dict
(see _registry.py). To add an algorithm:
  1. Create my_algo.py (no underscore prefix)
  2. Implement <name>_init(state, a, y) and <name>_observe(state, a, y)
  3. Set ALGORITHM in the module
  4. The registry auto-discovers it
"""

from mcf.classifiers._registry import (
    available_algorithms,
    discover_algorithms,
    get_algorithm,
    get_registry,
    register_algorithm,
)
from mcf.classifiers._base import OnlineClassifier, run_stream

__all__ = [
    "OnlineClassifier",
    "run_stream",
    "available_algorithms",
    "discover_algorithms",
    "get_algorithm",
    "get_registry",
    "register_algorithm",
]
