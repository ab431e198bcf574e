"""
Algorithm plugin registry.

Each algorithm module in this package declares a module-level ALGORITHM dict:

    ALGORITHM = {
        "name":      "mcp",                    # CLI identifier
        "label":     "Maximum Cosine Perceptron",
        "framework": True,                     # certified by the target replay
        "keeps_ell": True,                     # ell column is meaningful in traces
        "init":      mcp_init,                 # (state, a, y) -> TrialOutcome
        "observe":   mcp_observe,              # (state, a, y) -> TrialOutcome
    }

discover_algorithms() imports every module not starting with "_" and registers it.
"""

import importlib
import logging
import pkgutil
from typing import Any, Dict, List

from mcf import config

logger = logging.getLogger(__name__)

_PACKAGE = "mcf.classifiers"
_REQUIRED_KEYS = ("name", "label", "framework", "keeps_ell", "init", "observe")

# ── Registry ─────────────────────────────────────────────────

_REGISTRY: Dict[str, Dict[str, Any]] = {}


def register_algorithm(name: str, entry: Dict[str, Any]):
    """Register an algorithm under its CLI name."""
    missing = [k for k in _REQUIRED_KEYS if k not in entry]
    if missing:
        raise ValueError(f"algorithm {name!r} is missing keys {missing}")
    _REGISTRY[name] = entry


def discover_algorithms() -> Dict[str, Dict[str, Any]]:
    """Import all algorithm modules in this package and return the registry."""
    package = importlib.import_module(_PACKAGE)
    for _importer, modname, _ispkg in pkgutil.iter_modules(package.__path__):
        if modname.startswith("_"):
            continue
        try:
            mod = importlib.import_module(f"{_PACKAGE}.{modname}")
            entry = getattr(mod, "ALGORITHM", None)
            if entry is not None:
                register_algorithm(entry["name"], entry)
        except Exception as e:
            logger.warning("could not load algorithm module '%s.%s': %s", _PACKAGE, modname, e)
    return dict(_REGISTRY)


def get_registry() -> Dict[str, Dict[str, Any]]:
    """Currently registered algorithms (without re-discovering)."""
    return dict(_REGISTRY)


def get_algorithm(name: str) -> Dict[str, Any]:
    if name not in _REGISTRY:
        discover_algorithms()
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {name!r}; available: {available_algorithms()}"
        ) from None


def available_algorithms() -> List[str]:
    """Registered names, in the canonical config order first."""
    registry = discover_algorithms() if not _REGISTRY else _REGISTRY
    ordered = [a for a in config.ALGORITHMS if a in registry]
    return ordered + sorted(a for a in registry if a not in ordered)
