"""Exact and simulated statistics of returns and resets of the reset random walk."""

__version__ = "0.1.0"

from .params import ResetParams  # noqa: E402

__all__ = ["ResetParams", "__version__"]
