"""Spectral toolkit for metric graphs with standard and Dirichlet vertices."""

__version__ = "0.1.0"
