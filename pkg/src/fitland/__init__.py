"""Exact fitness-landscape statistics for comparing local and random search."""
__version__ = "0.1.0"
