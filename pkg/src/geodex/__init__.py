"""geodex: geodesic structure of distance-transitive graphs over finite fields."""

__version__ = "0.1.0"

from .errors import GeodexError  # noqa: E402
from .families import Graph, GeneratorSet, build  # noqa: E402

__all__ = ["GeodexError", "Graph", "GeneratorSet", "build", "__version__"]
