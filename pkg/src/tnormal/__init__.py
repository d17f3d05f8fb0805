"""Exact tools for covers of non-normal numbers and digit emission."""

__version__ = "0.1.0"

from .exactset import Interval, IntervalUnion, normalize
from .polyalg import IntPolynomial, enumerate_P, poly
from .kernels import BACKEND

__all__ = ["BACKEND", "IntPolynomial", "Interval", "IntervalUnion", "enumerate_P", "normalize", "poly",
           "__version__"]
