"""Exact computations in SL_n over complete discrete valuation rings."""

__version__ = "0.1.0"
