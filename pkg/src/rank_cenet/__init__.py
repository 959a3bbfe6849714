"""Rank-correlation constrained elastic net (CENet) for the linear transformation model."""

__version__ = "0.1.0"
