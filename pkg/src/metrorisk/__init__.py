"""Risk indicators for people on metro platforms, from tracked pose streams."""

__version__ = "0.1.0"
