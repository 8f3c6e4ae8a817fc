"""Exact verification of graded Morita theory for non-unital idempotent rings over F_p."""

__version__ = "0.1.0"
