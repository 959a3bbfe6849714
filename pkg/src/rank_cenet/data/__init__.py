"""Datasets, rank statistics and simulation."""
