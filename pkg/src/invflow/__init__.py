"""Exact curvature-flow monotonicity toolkit."""
