"""Exact algebra for distributed-parameter networks over k[G_Q]."""

from .coeff import Poly, RatFun, SigmaSpec, sqrt_sigma
from .trigring import TrigElement, TrigRing, exact_div, is_unit, mul

__version__ = "0.1.0"

__all__ = [
    "Poly",
    "RatFun",
    "SigmaSpec",
    "sqrt_sigma",
    "TrigElement",
    "TrigRing",
    "exact_div",
    "is_unit",
    "mul",
]
