"""Exact verification of the q-oscillator tetrahedron r-matrix and its PBW origin."""

from .exactnum import LaurentQ, bracket_factorial, eval_at, qpochhammer
from .qoscr import r_apply, r_element, r_row
from .report import VerifyReport

__all__ = [
    "LaurentQ",
    "VerifyReport",
    "bracket_factorial",
    "eval_at",
    "qpochhammer",
    "r_apply",
    "r_element",
    "r_row",
]

__version__ = "0.1.0"
