"""Exact list-decoding experiments for random linear and punctured codes."""

__version__ = "0.1.0"
