"""Exact small-lattice numerics for six-vertex currents, SOS currents and the cyclic SOS spectrum."""

from .errors import VertexLabError
from .numerics import ModelParams, ToleranceConfig

__version__ = "0.1.0"

__all__ = ["ModelParams", "ToleranceConfig", "VertexLabError", "__version__"]
