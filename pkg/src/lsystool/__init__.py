"""Toolkit for bracketed turtle-word datasets: generation, canonical
form, rendering, and prediction scoring."""

from .backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
