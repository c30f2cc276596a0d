"""Exact conformally equivariant quantization on the flat model R^{p,q}."""

from .ring import Fraction, PhasePoly, Rational, Signature, poisson
from .opalg import DiffOp, PhaseOp, normal_order_N, op_apply, op_compose, right_divide, sharp

__version__ = "0.1.0"

__all__ = [
    "Fraction",
    "Rational",
    "PhasePoly",
    "Signature",
    "poisson",
    "DiffOp",
    "PhaseOp",
    "normal_order_N",
    "op_apply",
    "op_compose",
    "right_divide",
    "sharp",
]
