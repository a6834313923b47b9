"""Greedy sparse recovery (OMP / OLS) with coherence-and-decay recovery certificates."""

from greedcert.config import TOOL_VERSION as __version__

__all__ = ["__version__"]
