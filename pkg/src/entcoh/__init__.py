"""Exact secondary Hochschild cohomology of entwining structures over a commutative base."""

__version__ = "0.1.0"
