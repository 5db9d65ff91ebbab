"""Matrix differential operators acting from the right, and quasi-weights.

A right operator D = sum_j d^j . C_j(x) acts on a matrix (or row) polynomial P
as P.D = sum_j P^(j)(x) C_j(x): differentiate first, multiply the coefficient
on the right afterwards.  Coefficients are rational matrix functions with a
scalar denominator (everything this package needs stays in that class).

A QuasiWeight is V(x) * x^(nu - s) * e^(-x) with V a matrix polynomial, kept
normalized so that x does not divide V.  These carry the weight matrices and
their derivatives through the symmetry/Pearson computations exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .algebra import MatPoly, P_ONE, P_X, Poly, RatMatFun, _coerce_rmf


class RightDiffOp:
    """D = sum_{j=0}^{order} d^j . C_j, coefficients C_j rational matrix functions."""

    __slots__ = ("n", "coeffs")

    def __init__(self, coeffs: Sequence, n: int | None = None):
        cs = []
        for c in coeffs:
            if isinstance(c, RatMatFun):
                cs.append(c)
            elif isinstance(c, MatPoly):
                cs.append(RatMatFun(c, P_ONE, reduce=False))
            else:
                raise TypeError("coefficients must be RatMatFun or MatPoly")
        if not cs:
            if n is None:
                raise ValueError("empty operator needs an explicit size")
            cs = [RatMatFun(MatPoly.zero(n), P_ONE, reduce=False)]
        sizes = {c.n for c in cs}
        if len(sizes) != 1:
            raise ValueError("coefficient size mismatch")
        while len(cs) > 1 and cs[-1].num.is_zero():
            cs.pop()
        object.__setattr__(self, "n", cs[0].n)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("RightDiffOp is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def identity(n: int) -> "RightDiffOp":
        return RightDiffOp([MatPoly.identity(n)])

    @staticmethod
    def mult(M: MatPoly | RatMatFun) -> "RightDiffOp":
        """Order-0 operator: right multiplication by M."""
        return RightDiffOp([M])

    @staticmethod
    def ddx(n: int) -> "RightDiffOp":
        return RightDiffOp([MatPoly.zero(n), MatPoly.identity(n)])

    def coeff(self, j: int) -> RatMatFun:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return RatMatFun(MatPoly.zero(self.n), P_ONE, reduce=False)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def __add__(self, other) -> "RightDiffOp":
        if isinstance(other, (int, Fraction, Poly, MatPoly, RatMatFun)):
            other = RightDiffOp([_coerce_rmf(other, self.n)])
        if not isinstance(other, RightDiffOp):
            return NotImplemented
        k = max(self.order, other.order)
        return RightDiffOp([self.coeff(j) + other.coeff(j) for j in range(k + 1)])

    __radd__ = __add__

    def __neg__(self) -> "RightDiffOp":
        return RightDiffOp([-c for c in self.coeffs])

    def __sub__(self, other) -> "RightDiffOp":
        if isinstance(other, (int, Fraction, Poly, MatPoly, RatMatFun)):
            other = RightDiffOp([_coerce_rmf(other, self.n)])
        return self + (-other)

    def __eq__(self, other) -> bool:
        """Coefficient-wise equality as rational functions (cross-multiplied)."""
        if not isinstance(other, RightDiffOp):
            return NotImplemented
        k = max(self.order, other.order)
        return all(self.coeff(j) == other.coeff(j) for j in range(k + 1))

    def __repr__(self):
        return f"RightDiffOp(order={self.order}, n={self.n})"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_json() for c in self.coeffs]}

    @staticmethod
    def from_json(data: dict) -> "RightDiffOp":
        return RightDiffOp([RatMatFun.from_json(c) for c in data["coeffs"]])


def apply_right(D: RightDiffOp, P: MatPoly | RatMatFun) -> RatMatFun:
    """P . D = sum_j P^(j) C_j, exact."""
    if isinstance(P, MatPoly):
        P = RatMatFun(P, P_ONE, reduce=False)
    if P.n != D.n:
        raise ValueError("size mismatch")
    out = None
    dP = P
    for j, C in enumerate(D.coeffs):
        if j > 0:
            dP = dP.deriv()
        if C.num.is_zero():
            continue
        term = dP @ C
        out = term if out is None else out + term
    if out is None:
        out = RatMatFun(MatPoly.zero(D.n), P_ONE, reduce=False)
    return out


def compose(D2: RightDiffOp, D1: RightDiffOp) -> RightDiffOp:
    """Composition with D2 applied first: P . compose(D2, D1) = (P . D2) . D1.

    Expanding (sum_j d^j C_j) followed by (sum_i d^i B_i) via Leibniz:
    the d^s coefficient is  E_s = sum_{j+r=s} sum_{i >= r} C(i, r) C_j^(i-r) B_i.
    """
    if D2.n != D1.n:
        raise ValueError("size mismatch")
    order = D2.order + D1.order
    zero = RatMatFun(MatPoly.zero(D2.n), P_ONE, reduce=False)
    out = [zero] * (order + 1)
    for i in range(D1.order + 1):
        B = D1.coeff(i)
        if B.num.is_zero():
            continue
        for j in range(D2.order + 1):
            Cd = D2.coeff(j)  # successively differentiated below
            for r in range(i, -1, -1):
                # Cd currently holds C_j^(i-r)
                if not Cd.num.is_zero():
                    out[j + r] = out[j + r] + (Cd @ B) * comb(i, r)
                if r > 0:
                    Cd = Cd.deriv()
    return RightDiffOp(out)


class QuasiWeight:
    """W(x) = V(x) * x^(nu - s) * e^(-x), V not divisible by x."""

    __slots__ = ("V", "nu", "shift")

    def __init__(self, V: MatPoly, nu: Fraction, shift: int = 0):
        nu = Fraction(nu)
        # normalize: pull every common factor of x out of V into the shift
        while not V.is_zero() and all(e.is_zero() or e[0] == 0
                                      for row in V.entries for e in row):
            V = MatPoly([[Poly(e.coeffs[1:]) for e in row] for row in V.entries])
            shift -= 1
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "shift", shift)

    def __setattr__(self, *a):
        raise AttributeError("QuasiWeight is immutable")

    @property
    def n(self) -> int:
        return self.V.n

    def _aligned(self, other: "QuasiWeight") -> tuple[MatPoly, MatPoly, int]:
        if self.nu != other.nu:
            raise ValueError("quasi-weights with different nu")
        s = max(self.shift, other.shift)
        a = self.V * P_X.shift(s - self.shift - 1) if s > self.shift else self.V
        b = other.V * P_X.shift(s - other.shift - 1) if s > other.shift else other.V
        return a, b, s

    def __add__(self, other: "QuasiWeight") -> "QuasiWeight":
        a, b, s = self._aligned(other)
        return QuasiWeight(a + b, self.nu, s)

    def __neg__(self) -> "QuasiWeight":
        return QuasiWeight(-self.V, self.nu, self.shift)

    def __sub__(self, other: "QuasiWeight") -> "QuasiWeight":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiWeight):
            return NotImplemented
        if self.V.is_zero() and other.V.is_zero():
            return True
        a, b, _ = self._aligned(other)
        return a == b

    def is_zero(self) -> bool:
        return self.V.is_zero()

    def lmul(self, M: MatPoly) -> "QuasiWeight":
        """M(x) . W(x)."""
        return QuasiWeight(M @ self.V, self.nu, self.shift)

    def rmul(self, M: MatPoly) -> "QuasiWeight":
        """W(x) . M(x)."""
        return QuasiWeight(self.V @ M, self.nu, self.shift)

    def transpose(self) -> "QuasiWeight":
        return QuasiWeight(self.V.transpose(), self.nu, self.shift)

    def eval_mp(self, x):
        """Numeric value as a nested list, at mpmath x > 0."""
        import mpmath as mp

        xm = mp.mpf(x) if not isinstance(x, mp.mpf) else x
        expo = mp.mpf(self.nu.numerator) / mp.mpf(self.nu.denominator) - self.shift
        scale = mp.power(xm, expo) * mp.exp(-xm)
        return [[e.eval_mp(xm) * scale for e in row] for row in self.V.entries]

    def __repr__(self):
        return f"QuasiWeight(n={self.n}, shift={self.shift}, deg V={self.V.degree})"


def quasi_derivative(W: QuasiWeight) -> QuasiWeight:
    """d/dx of V x^(nu-s) e^(-x):  (V' x + (nu-s) V - x V) at shift s+1.

    The result stays in the class; nu is carried along unchanged.
    """
    Vp = W.V.deriv()
    s = W.shift
    V_new = Vp * P_X + W.V * (W.nu - s) - W.V * P_X
    return QuasiWeight(V_new, W.nu, s + 1)
