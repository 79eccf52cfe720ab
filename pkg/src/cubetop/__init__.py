"""Checkers for finite nonpositively curved cube complexes and graphs of cube complexes."""

__version__ = "0.1.0"
