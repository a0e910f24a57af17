"""Monotone rough isometries between Bernoulli percolations on the naturals."""

__version__ = "0.1.0"
