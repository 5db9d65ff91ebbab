"""Matrix-valued exceptional orthogonal polynomials, exactly.

Construction of matrix-valued exceptional Laguerre polynomial families by a
Darboux-type factorization of a matrix Laguerre differential operator, with
exact-rational verification of the algebraic identities and extended-precision
numerics for orthogonality and zero patterns.
"""

from .algebra import (
    Fraction,
    MatPoly,
    Poly,
    Rat,
    RatMatFun,
    mat_adjugate,
    mat_det,
    pochhammer,
    poly_divrem,
    poly_gcd,
)
from .laguerre import Params
from .rightops import QuasiWeight, RightDiffOp, apply_right, compose, quasi_derivative

__all__ = [
    "Fraction",
    "MatPoly",
    "Params",
    "Poly",
    "QuasiWeight",
    "Rat",
    "RatMatFun",
    "RightDiffOp",
    "apply_right",
    "compose",
    "mat_adjugate",
    "mat_det",
    "pochhammer",
    "poly_divrem",
    "poly_gcd",
    "quasi_derivative",
]

__version__ = "0.1.0"
