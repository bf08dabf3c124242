"""Exact and asymptotic statistics of random domino tilings of the Aztec diamond."""

__version__ = "0.1.0"
