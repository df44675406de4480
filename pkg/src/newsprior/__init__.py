"""Outlet reliability profiling, article factuality and claim checking."""

__version__ = "0.1.0"
