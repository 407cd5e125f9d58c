"""Next-sentence-prediction bridge: serves successor probabilities for text
pairs over a line-delimited JSON stdin/stdout protocol, or scores a request
file offline."""

__version__ = "0.1.0"

from .bridge import BridgeConfig, NspScorer
from .protocol import score_file, serve

__all__ = ["BridgeConfig", "NspScorer", "score_file", "serve", "__version__"]
