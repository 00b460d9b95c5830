"""Locally recoverable codes from elliptic curves and elliptic surfaces."""

__version__ = "0.1.0"
