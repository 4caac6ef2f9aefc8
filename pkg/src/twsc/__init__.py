"""Lossy transmission of correlated sources over two-way channels."""

__version__ = "0.1.0"
