"""Partition-based semantic differencing for MiniLang programs."""

__version__ = "0.1.0"
