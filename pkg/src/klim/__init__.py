"""Relative atomic complexes of k-equal arrangements, their direct limits, and
exact rational (co)homology computations on them."""

__version__ = "0.1.0"
