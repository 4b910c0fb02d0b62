"""Symbolic engine for group-approach quantization of centrally extended Lie groups."""

__version__ = "0.1.0"
