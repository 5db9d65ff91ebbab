"""Maps between the differential and difference sides of the construction.

The multiplication operator x acts on the monic family through the three-term
recurrence; conjugating by the first-order intertwiners transports it to the
exceptional family:

    xi(D)   = B D A          (differential side, acting on the hat family)
    chi(M)  = (Gamma_n - lam) M   (difference side)

and the two transports agree on the families themselves (the commuting
diagram checked per n).  The scalar (N = 1) instance of the difference side
is a continuous dual Hahn family in disguise; cdh_check verifies that
correspondence against the standard recurrence, exactly, at enough points to
pin the polynomials down.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import MatPoly, P_ONE, P_X, Poly, RatMatFun, pochhammer
from .exceptional import xpoly
from .laguerre import Params, build_T0, gamma_n, monic_mvop, ttr
from .rightops import RightDiffOp, apply_right, compose
from .seed import build_Am, build_Bm, lam


@dataclass(frozen=True)
class TTROperator:
    """Multiplication by x as a difference operator on the monic family:
    x P_n = P_{n+1} + B_n P_n + C_n P_{n-1} (coefficients per n)."""

    p: Params

    def coeffs(self, n: int):
        """(A_+1, A_0, A_-1)(n) = (Id, B_n, C_n)."""
        B, C = ttr(self.p, n)
        I = tuple(tuple(Fraction(1) if i == j else Fraction(0)
                        for j in range(self.p.N)) for i in range(self.p.N))
        return I, B, C

    def apply(self, n: int) -> MatPoly:
        """The right-hand side P_{n+1} + B_n P_n + C_n P_{n-1}."""
        _, B, C = self.coeffs(n)
        out = monic_mvop(self.p, n + 1).P \
            + MatPoly.from_const(B) @ monic_mvop(self.p, n).P
        if n > 0:
            out = out + MatPoly.from_const(C) @ monic_mvop(self.p, n - 1).P
        return out

    def verify(self, n: int) -> bool:
        return self.apply(n) == monic_mvop(self.p, n).P * P_X


def _x_op(N: int) -> RightDiffOp:
    return RightDiffOp([MatPoly.from_scalar(N, P_X)])


@lru_cache(maxsize=None)
def xi_of_x(p: Params) -> RightDiffOp:
    """The transported multiplication operator B x A on the hat side."""
    return compose(compose(build_Bm(p), _x_op(p.N)), build_Am(p))


def xi_hat(p: Params, D: RightDiffOp) -> RightDiffOp:
    """The reverse transport A D B (hat side back to the base side)."""
    return compose(compose(build_Am(p), D), build_Bm(p))


def chi_of(p: Params, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """The twist factor Gamma_n - lam; invertible whenever nu > m - 1
    (its diagonal is -(nu + n + j - m))."""
    G = gamma_n(p, n)
    return tuple(tuple(G[i][j] - (lam(p) if i == j else 0)
                       for j in range(p.N)) for i in range(p.N))


def verify_diagram(p: Params, n: int) -> bool:
    """P-hat_n . (B x A) = (Gamma_n - lam)(P-hat_{n+1} + B_n P-hat_n
    + C_n P-hat_{n-1}): the two transports of x agree on the family."""
    _, B, C = TTROperator(p).coeffs(n)
    rhs = xpoly(p, n + 1).Phat + MatPoly.from_const(B) @ xpoly(p, n).Phat
    if n > 0:
        rhs = rhs + MatPoly.from_const(C) @ xpoly(p, n - 1).Phat
    rhs = MatPoly.from_const(chi_of(p, n)) @ rhs
    return apply_right(xi_of_x(p), xpoly(p, n).Phat) == RatMatFun(rhs, P_ONE)


def verify_xi_roundtrip(p: Params) -> bool:
    """(xi-hat of xi)(x) = (T0 - lam) x (T0 - lam) as an exact operator
    identity in rational coefficients."""
    T0l = build_T0(p) - lam(p)
    lhs = xi_hat(p, xi_of_x(p))
    rhs = compose(compose(T0l, _x_op(p.N)), T0l)
    return lhs == rhs


def verify_chi_roundtrip(p: Params, n: int) -> bool:
    """The twisted-twice difference operator (chi-hat of chi) applied to the
    base family matches the operator round trip applied to P_n:

    P_n . (A B x A B) = sum_j (Gamma_n - lam) A_j(n) (Gamma_{n+j} - lam) P_{n+j}
    """
    _, B, C = TTROperator(p).coeffs(n)
    Gn = MatPoly.from_const(chi_of(p, n))
    terms = Gn @ MatPoly.from_const(chi_of(p, n + 1)) @ monic_mvop(p, n + 1).P \
        + Gn @ MatPoly.from_const(B) @ MatPoly.from_const(chi_of(p, n)) \
        @ monic_mvop(p, n).P
    if n > 0:
        terms = terms + Gn @ MatPoly.from_const(C) \
            @ MatPoly.from_const(chi_of(p, n - 1)) @ monic_mvop(p, n - 1).P
    lhs = apply_right(xi_hat(p, xi_of_x(p)), monic_mvop(p, n).P)
    return lhs == RatMatFun(terms, P_ONE)


def _cdh_q(alpha: Fraction, m: int, K: int) -> list[Poly]:
    """q_0..q_K from the twisted three-term recurrence: with
    a-hat_n = -n-alpha-1+m, b-hat_n = (-n-alpha+m)(2n+alpha+1),
    c-hat_n = (-n-alpha+1+m) n (n+alpha), the q_n are determined by q_0 = 1 and

        a-hat_n q_{n+1} + b-hat_n q_n + c-hat_n q_{n-1} = -(t + alpha^2/2) q_n.
    """
    ev = Poly([-alpha * alpha / 2, -1])  # -(t + alpha^2/2)
    qs = [P_ONE]
    for n in range(K):
        ahat = -n - alpha - 1 + m
        bhat = (-n - alpha + m) * (2 * n + alpha + 1)
        chat = (-n - alpha + 1 + m) * n * (n + alpha)
        if ahat == 0:
            raise ValueError("degenerate recurrence prefactor")
        nxt = (ev * qs[n] - qs[n] * bhat
               - (qs[n - 1] * chat if n > 0 else Poly())) * (1 / ahat)
        qs.append(nxt)
    return qs


def _cdh_S(a: Fraction, b: Fraction, c: Fraction, K: int) -> list[Poly]:
    """Continuous dual Hahn S_n as polynomials in y = x^2, from the standard
    normalized recurrence -(a^2 + y) S~_n = A_n S~_{n+1} - (A_n + C_n) S~_n
    + C_n S~_{n-1} with A_n = (n+a+b)(n+a+c), C_n = n (n+b+c-1), rescaled by
    (a+b)_n (a+c)_n."""
    ev = Poly([-a * a, -1])
    st = [P_ONE]
    for n in range(K):
        A_n = (n + a + b) * (n + a + c)
        C_n = n * (n + b + c - 1)
        nxt = (ev * st[n] + st[n] * (A_n + C_n)
               - (st[n - 1] * C_n if n > 0 else Poly())) * (1 / A_n)
        st.append(nxt)
    return [s * (pochhammer(a + b, n) * pochhammer(a + c, n))
            for n, s in enumerate(st)]


def cdh_check(alpha: Fraction, m: int, K: int) -> bool:
    """The scalar three-term family equals a continuous dual Hahn family:

        q_n(t) = (-1)^n / (alpha+1-m)_n * S_n(t + a^2; a, b, c),
        a = alpha/2, b = alpha/2 - m, c = alpha/2 + 1,

    compared exactly at n + 2 rational points per degree-n pair."""
    alpha = Fraction(alpha)
    if alpha <= m:
        raise ValueError("needs alpha > m")
    a, b, c = alpha / 2, alpha / 2 - m, alpha / 2 + 1
    qs = _cdh_q(alpha, m, K)
    Ss = _cdh_S(a, b, c, K)
    for n in range(K + 1):
        if qs[n].degree != n:
            return False
        pref = Fraction(-1 if n % 2 else 1) / pochhammer(alpha + 1 - m, n)
        for t in range(n + 2):
            if qs[n](Fraction(t)) != pref * Ss[n](Fraction(t) + a * a):
                return False
    return True
