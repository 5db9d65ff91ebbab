"""Seed matrices, the gauge polynomial, and the factorizing intertwiners.

The lower-triangular seed matrix F(x) (degree m in x) encodes an eigenfunction
x^(-nu-J) F(x) of the second-order operator with scalar eigenvalue
lam = alpha - m.  Its determinant never vanishes on [0, inf), which lets the
scalar gauge polynomial U(x) = x det F(x) clear every denominator in sight:

    A = d.U - Phi,            Phi = -nu det(F) Id - adj(F) J F + x adj(F) F'
    B = U^{-1} (d.x + M1 x + M2 + Phi/U . x)

with A of order 1 and polynomial, B of order 1 with scalar-rational
coefficients, and compose(A, B) + lam recovering the original operator.

Note on Phi's last term: expanding adj(F) against F' forces the +x adj(F) F'
sign; the diagonal identity Phi_ii = ((-nu-i) F_ii + x F'_ii) prod_{p != i}
F_pp is asserted in the tests, and the factorization identity below would fail
loudly with the opposite sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath as mp

from .algebra import (
    MatPoly,
    P_ONE,
    P_X,
    Poly,
    RatMatFun,
    mat_adjugate,
    mat_det,
    pochhammer,
    poly_divrem,
    sturm_count_nonneg,
)
from .laguerre import Params, _J, build_T0, t0_matrices
from .rightops import RightDiffOp, compose


def lam(p: Params) -> Fraction:
    """Scalar eigenvalue of the seed: alpha - m."""
    return p.alpha - p.m


def seed_coeff(p: Params, i: int, j: int, k: int) -> Fraction:
    """Series coefficient c_{i,j,k} of the seed entry F_{i,j} (1-based i, j).

    c_{i,j,k} = [(-1)^(i-j-1) (-i)_j (-alpha-i)_{i-j} mu_1 / (i (alpha+2)_{i-1} mu_j)]
                * (-m)_k (-alpha-j)_k / ((1-nu-i)_k (-alpha-i)_k k!)

    Vanishes for j > i (the (-i)_j factor) and for k > m (the (-m)_k factor).
    """
    if not (1 <= i <= p.N and 1 <= j <= p.N and k >= 0):
        raise ValueError("index out of range")
    if j > i:
        return Fraction(0)
    a, nu = p.alpha, p.nu
    pre = (pochhammer(-i, j) * pochhammer(-a - i, i - j) * p.mu[0]) \
        / (i * pochhammer(a + 2, i - 1) * p.mu[j - 1])
    if (i - j - 1) % 2:
        pre = -pre
    ser = (pochhammer(-p.m, k) * pochhammer(-a - j, k)) \
        / (pochhammer(1 - nu - i, k) * pochhammer(-a - i, k) * factorial(k))
    return pre * ser


def _onefone(m: int, b: Fraction) -> Poly:
    """Truncating confluent series sum_k (-m)_k x^k / ((b)_k k!)."""
    return Poly([pochhammer(-m, k) / (pochhammer(b, k) * factorial(k))
                 for k in range(m + 1)])


def detf_closed_form(p: Params) -> Poly:
    """Product formula for det F: over the diagonal, each factor is
    c_{k,k,0} times a terminating confluent series at parameter 1-nu-k."""
    out = P_ONE
    for k in range(1, p.N + 1):
        out = out * (_onefone(p.m, 1 - p.nu - k) * seed_coeff(p, k, k, 0))
    return out


@dataclass(frozen=True)
class SeedData:
    """Seed matrix F with its determinant, gauge polynomial U = x det F, and
    the cleared log-derivative polynomial Phi.  `positive_certified` records
    whether det F was certified to have no roots in [0, inf)."""

    m: int
    F: MatPoly
    detF: Poly
    Upsilon: Poly
    Phi: MatPoly
    positive_certified: bool

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "F": self.F.to_json(),
            "detF": self.detF.to_json(),
            "Upsilon": self.Upsilon.to_json(),
            "Phi": self.Phi.to_json(),
            "positive_certified": self.positive_certified,
        }


def _phi_of(F: MatPoly, nu: Fraction) -> MatPoly:
    """Phi = -nu det(F) Id - adj(F) J F + x adj(F) F' for a given seed matrix."""
    n = F.n
    J = MatPoly.from_const([[Fraction(i + 1) if i == j else Fraction(0)
                             for j in range(n)] for i in range(n)])
    adjF = mat_adjugate(F)
    return (MatPoly.from_scalar(n, mat_det(F) * (-nu))
            - adjF @ J @ F
            + (adjF @ F.deriv()) * P_X)


def _certify_positive(p: Params, detF: Poly) -> bool:
    """No roots of det F in [0, inf): primary route is one-signed coefficients
    of each diagonal series factor; Sturm count as fallback."""
    ok = True
    for k in range(1, p.N + 1):
        cs = _onefone(p.m, 1 - p.nu - k).coeffs
        if not (all(c > 0 for c in cs) or all(c < 0 for c in cs)):
            ok = False
            break
    if ok:
        return True
    return sturm_count_nonneg(detF) == 0


@lru_cache(maxsize=None)
def build_seed(p: Params) -> SeedData:
    F = MatPoly([[Poly([seed_coeff(p, i, j, k) for k in range(p.m + 1)])
                  for j in range(1, p.N + 1)] for i in range(1, p.N + 1)])
    detF = mat_det(F)
    closed = detf_closed_form(p)
    if detF != closed:
        raise RuntimeError("determinant mismatch between cofactor and closed form")
    Phi = _phi_of(F, p.nu)
    # leading coefficient of Phi must be invertible lower-triangular
    lead = Phi.coeff(p.m * p.N)
    if any(lead[i][i] == 0 for i in range(p.N)) or \
            any(lead[i][j] != 0 for i in range(p.N) for j in range(p.N) if j > i):
        raise RuntimeError("Phi leading coefficient is not invertible lower-triangular")
    return SeedData(m=p.m, F=F, detF=detF, Upsilon=detF.shift(1), Phi=Phi,
                    positive_certified=_certify_positive(p, detF))


def seed_residual(p: Params, F: MatPoly) -> MatPoly:
    """Residual of the seed equation for a candidate F, cleared of 1/x:

    x^2 F'' + x F'(M1 x + M2) - 2x (nu+J) F' + (nu+J)(nu+J+1) F
      - (nu+J) F (M1 x + M2) + x F (C - lam)

    Zero iff x^(-nu-J) F is an eigenfunction with eigenvalue lam = alpha - m.
    """
    M1, M2, C = t0_matrices(p)
    n = p.N
    nJ = _J(p) + MatPoly.from_scalar(n, Poly([p.nu]))
    nJ1 = nJ + MatPoly.identity(n)
    M12 = M1 * P_X + M2
    Fp, Fpp = F.deriv(), F.deriv().deriv()
    return (Fpp * P_X.shift(1)
            + (Fp @ M12) * P_X
            - (nJ @ Fp) * (P_X * 2)
            + nJ @ nJ1 @ F
            - nJ @ F @ M12
            + (F @ (C - lam(p))) * P_X)


def verify_seed(p: Params) -> bool:
    return seed_residual(p, build_seed(p).F).is_zero()


@lru_cache(maxsize=None)
def build_Am(p: Params) -> RightDiffOp:
    """First-order intertwiner A = d.U - Phi; polynomial, raises degree by mN."""
    sd = build_seed(p)
    return RightDiffOp([-sd.Phi, MatPoly.from_scalar(p.N, sd.Upsilon)])


@lru_cache(maxsize=None)
def build_Bm(p: Params) -> RightDiffOp:
    """First-order intertwiner in the opposite direction.

    B = U^{-1}(d.x + M1 x + M2 + (Phi/U) x); the scalar factor U^{-1} acts
    first, so the coefficients are C_1 = Id/detF and
    C_0 = [detF (M1 x + M2) - U' Id + Phi] / (x detF^2).
    """
    sd = build_seed(p)
    M1, M2, _ = t0_matrices(p)
    C1 = RatMatFun(MatPoly.identity(p.N), sd.detF)
    num = (M1 * P_X + M2) * sd.detF - MatPoly.from_scalar(p.N, sd.Upsilon.deriv()) + sd.Phi
    C0 = RatMatFun(num, sd.detF * sd.detF * P_X)
    return RightDiffOp([C0, C1])


@lru_cache(maxsize=None)
def build_T1(p: Params) -> RightDiffOp:
    """Darboux partner T1 = compose(B, A) + lam; second order, rational
    coefficients with denominators dividing powers of x detF."""
    return compose(build_Bm(p), build_Am(p)) + lam(p)


def verify_factorization(p: Params) -> bool:
    """compose(A, B) + lam = T0 and the intertwining A T1 = T0 A."""
    A, B, T0, T1 = build_Am(p), build_Bm(p), build_T0(p), build_T1(p)
    if compose(A, B) + lam(p) != T0:
        return False
    return compose(A, T1) == compose(T0, A)


def indicial_exponents(B1_0, B2_0) -> tuple:
    """Exponents at the regular singular point 0: roots (with multiplicity) of
    det(mu(mu-1) Id + mu B1(0) + B2(0)).

    Rational roots are certified exactly (numeric guess, exact substitution,
    exact deflation); anything left over is returned as numeric mpc values.
    """
    b1 = B1_0.coeff(0) if isinstance(B1_0, MatPoly) else tuple(map(tuple, B1_0))
    b2 = B2_0.coeff(0) if isinstance(B2_0, MatPoly) else tuple(map(tuple, B2_0))
    n = len(b1)
    # entries are quadratics in mu; reuse Poly with mu as the variable
    q = mat_det(MatPoly([[Poly([b2[i][j], b1[i][j] + (-1 if i == j else 0),
                                1 if i == j else 0])
                          for j in range(n)] for i in range(n)]))
    roots: list = []
    while q.degree > 0 and q[0] == 0:
        roots.append(Fraction(0))
        q = Poly(q.coeffs[1:])
    while q.degree > 0:
        cand = _rational_root(q)
        if cand is None:
            break
        roots.append(cand)
        q = poly_divrem(q, Poly([-cand, 1]))[0]
    if q.degree > 0:
        with mp.workprec(150):
            cs = [mp.mpf(c.numerator) / mp.mpf(c.denominator)
                  for c in reversed(q.coeffs)]
            roots.extend(mp.polyroots(cs, maxsteps=200, extraprec=80))
    return tuple(sorted(roots, key=_root_key))


def _root_key(r):
    if isinstance(r, Fraction):
        return (0, float(r), 0.0)
    return (1, float(mp.re(r)), float(mp.im(r)))


def _rational_root(q: Poly):
    """One exact rational root of q, found by certifying numeric candidates."""
    with mp.workprec(150):
        cs = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in reversed(q.coeffs)]
        try:
            numeric = mp.polyroots(cs, maxsteps=200, extraprec=80)
        except mp.libmp.NoConvergence:
            return None
        for r in numeric:
            if abs(mp.im(r)) < mp.mpf(2) ** -60:
                cand = Fraction(float(mp.re(r))).limit_denominator(10 ** 6)
                if q(cand) == 0:
                    return cand
    return None
