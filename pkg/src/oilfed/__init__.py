"""Discrete-event simulator for deadline-aware task allocation in a federation of edge nodes."""

from oilfed.stats import NormalDist, OnlineStat

__version__ = "0.1.0"

__all__ = ["NormalDist", "OnlineStat", "__version__"]
