"""Exact computations for the Shimura correspondence over real quadratic fields."""

__version__ = "0.1.0"
