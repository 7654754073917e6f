"""Exact workbench for asymptotic differential algebra over concrete fields."""

__version__ = "0.1.0"
