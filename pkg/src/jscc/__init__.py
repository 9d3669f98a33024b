"""Lossless joint source-channel coding with randomized linear codes."""

__version__ = "0.1.0"
