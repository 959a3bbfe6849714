"""Sparse estimators: CENet and the lasso baseline."""
