"""Irreducible contact graphs of equal-circle packings on the sphere."""

__version__ = "0.2.0"
