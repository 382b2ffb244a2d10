"""Teichmueller TQFT partition functions of FAMED ideal triangulations."""
from .kernels import BACKEND

__version__ = "0.1.0"
FORMAT_VERSION = 1

__all__ = ["BACKEND", "__version__", "FORMAT_VERSION"]
