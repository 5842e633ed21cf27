"""pourlab: reward-weight mutation and skill diversification on a 2-D pouring task."""

__version__ = "0.1.0"
