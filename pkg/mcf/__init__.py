"""MCF — Maximum Cosine Framework online classifiers, certificates and the MNIST bench."""

from mcf.config import APP_VERSION as __version__

__all__ = ["__version__"]
