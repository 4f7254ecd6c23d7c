"""Numerical and exact laboratory for embeddings between local Hardy and alpha-modulation spaces."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
