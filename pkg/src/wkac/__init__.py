"""Exact computations for minimal W-algebras of rank <= 2 superalgebras."""

__version__ = "0.1.0"
