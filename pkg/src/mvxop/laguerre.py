"""Matrix Laguerre weight, its second-order operator, and monic MVOPs.

The weight on (0, inf) is W(x) = L(x) T(x) L(x)^T with T(x) the diagonal
e^(-x) x^(nu+i) delta_i and L(x) a unimodular lower-triangular matrix built
from scalar Laguerre polynomials.  The associated second-order operator acts
from the right and has the monic matrix orthogonal polynomials P_n as
eigenfunctions with left eigenvalue matrices Gamma_n.

Everything here is exact: moments are computed relative to the common factor
Gamma(nu+1), which cancels from every identity we verify, so the whole
construction lives in Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import (
    MatPoly,
    P_ONE,
    P_X,
    Poly,
    lin_solve,
    mat_adjugate,
    pochhammer,
)
from .rightops import QuasiWeight, RightDiffOp, apply_right


@dataclass(frozen=True)
class Params:
    """Parameter bundle: size N, exponents alpha/nu, twist mu, scale delta,
    and the seed degree m used by the factorization modules.

    Constraints: nu > max(0, m-1); alpha > 0; neither alpha nor nu may be an
    integer below m (the seed's hypergeometric coefficients would divide by
    zero); all mu_i nonzero; all delta_i positive.  `allow_small_nu` skips the
    nu lower bound — useful for zero-pattern experiments only, nothing
    involving integrals is asserted in that regime.
    """

    N: int
    alpha: Fraction
    nu: Fraction
    mu: tuple[Fraction, ...]
    delta: tuple[Fraction, ...]
    m: int = 0
    allow_small_nu: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "nu", Fraction(self.nu))
        object.__setattr__(self, "mu", tuple(Fraction(v) for v in self.mu))
        object.__setattr__(self, "delta", tuple(Fraction(v) for v in self.delta))
        if self.N < 1:
            raise ValueError("N must be positive")
        if len(self.mu) != self.N or len(self.delta) != self.N:
            raise ValueError("mu and delta must have length N")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not self.allow_small_nu and self.nu <= max(0, self.m - 1):
            raise ValueError(
                "standing assumption violated: nu must exceed max(0, m-1) = "
                f"{max(0, self.m - 1)} so the weight has finite moments and "
                "the seed determinant stays root-free on [0, inf); pass "
                "--allow-small-nu to waive (integral claims then uncertified)")
        for name, val in (("alpha", self.alpha), ("nu", self.nu)):
            if val.denominator == 1 and val < self.m:
                raise ValueError(f"{name} must not be an integer below m")
        if any(v == 0 for v in self.mu):
            raise ValueError("mu entries must be nonzero")
        if any(v <= 0 for v in self.delta):
            raise ValueError("delta entries must be positive")


@dataclass(frozen=True)
class MVOPData:
    """Monic orthogonal polynomial P_n with its squared norm H_n and left
    eigenvalue matrix Gamma_n.  H is stored relative to Gamma(nu+1)."""

    n: int
    P: MatPoly
    H: tuple[tuple[Fraction, ...], ...]
    Gamma: tuple[tuple[Fraction, ...], ...]

    def to_json(self) -> dict:
        from .algebra import rat_str

        return {
            "n": self.n,
            "P": self.P.to_json(),
            "H": [[rat_str(v) for v in row] for row in self.H],
            "Gamma": [[rat_str(v) for v in row] for row in self.Gamma],
        }


def scalar_laguerre(n: int, beta: Fraction) -> Poly:
    """Classical Laguerre polynomial L_n^(beta) with exact coefficients:
    sum_k (-1)^k (beta+k+1)_{n-k} / ((n-k)! k!) x^k."""
    from math import factorial

    cs = []
    for k in range(n + 1):
        c = pochhammer(beta + k + 1, n - k) / (factorial(n - k) * factorial(k))
        cs.append(c if k % 2 == 0 else -c)
    return Poly(cs)


def build_L(p: Params) -> MatPoly:
    """Unimodular lower-triangular matrix with (i,j) entry
    (mu_i/mu_j) L_{i-j}^{(alpha+j)}(x) for i >= j (1-based)."""
    rows = []
    for i in range(1, p.N + 1):
        row = []
        for j in range(1, p.N + 1):
            if i < j:
                row.append(Poly())
            else:
                row.append(scalar_laguerre(i - j, p.alpha + j) * (p.mu[i - 1] / p.mu[j - 1]))
        rows.append(row)
    return MatPoly(rows)


def build_weight(p: Params) -> QuasiWeight:
    """The weight as a quasi-weight: V(x) x^(nu-s) e^(-x) with
    V = L diag(delta_i x^i) L^T.  The common factor x is normalized into the
    shift, so the returned V is not divisible by x."""
    L = build_L(p)
    D = MatPoly([[P_X.shift(i) * p.delta[i] if i == j else Poly()
                  for j in range(p.N)] for i in range(p.N)])
    V = L @ D @ L.transpose()
    return QuasiWeight(V, p.nu, 0)


def a_mu(p: Params) -> MatPoly:
    """Nilpotent single-subdiagonal matrix with entries -mu_i/mu_{i-1}."""
    g = [[Fraction(0)] * p.N for _ in range(p.N)]
    for i in range(1, p.N):
        g[i][i - 1] = -p.mu[i] / p.mu[i - 1]
    return MatPoly.from_const(g)


def _J(p: Params) -> MatPoly:
    return MatPoly.from_const([[Fraction(i + 1) if i == j else Fraction(0)
                                for j in range(p.N)] for i in range(p.N)])


@lru_cache(maxsize=None)
def t0_matrices(p: Params) -> tuple[MatPoly, MatPoly, MatPoly]:
    """The constant matrices (M1, M2, C) of the second-order operator."""
    A = a_mu(p)
    J = _J(p)
    I = MatPoly.identity(p.N)
    inv = mat_adjugate(A + I)  # det(A + I) = 1, so the adjugate is the inverse
    M1 = -inv
    M2 = I * (p.nu + 1) + J + (I * p.alpha + J) @ A
    C = inv * (p.alpha - p.nu) - J
    return M1, M2, C


def build_T0(p: Params) -> RightDiffOp:
    """Second-order operator d^2.x + d.(M1 x + M2) + C acting from the right."""
    M1, M2, C = t0_matrices(p)
    return RightDiffOp([C, M1 * P_X + M2, MatPoly.from_scalar(p.N, P_X)])


def gamma_n(p: Params, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Left eigenvalue matrix Gamma_n = (-n+alpha-nu)(A+1)^{-1} - J; lower
    triangular with spectrum {-n+alpha-nu-j : j = 1..N}."""
    A = a_mu(p)
    inv = mat_adjugate(A + MatPoly.identity(p.N))
    G = inv * (p.alpha - p.nu - n) - _J(p)
    return G.coeff(0)


@lru_cache(maxsize=None)
def moments(p: Params, k: int) -> tuple[tuple[Fraction, ...], ...]:
    """S_k = integral of x^k W(x) dx over (0, inf), relative to Gamma(nu+1).

    Each entry expands to sum_p c_p (nu+1)_{k+p-s} with c_p the coefficients
    of the V entry and s the quasi-weight shift."""
    w = build_weight(p)
    s = w.shift
    out = []
    for row in w.V.entries:
        orow = []
        for e in row:
            val = Fraction(0)
            for pw, c in enumerate(e.coeffs):
                if c:
                    val += c * pochhammer(p.nu + 1, k + pw - s)
            orow.append(val)
        out.append(tuple(orow))
    return tuple(out)


def _mat_mul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(mid)) for j in range(m))
                 for i in range(n))


def _mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def inner_weight(p: Params, P: MatPoly, Q: MatPoly) -> tuple[tuple[Fraction, ...], ...]:
    """Exact <P, Q>_W = sum_{a,b} P_a S_{a+b} Q_b^T, relative to Gamma(nu+1)."""
    out = tuple(tuple(Fraction(0) for _ in range(p.N)) for _ in range(p.N))
    for a in range(P.degree + 1):
        Pa = P.coeff(a)
        for b in range(Q.degree + 1):
            t = _mat_mul(_mat_mul(Pa, moments(p, a + b)), tuple(zip(*Q.coeff(b))))
            out = tuple(tuple(x + y for x, y in zip(ro, rt)) for ro, rt in zip(out, t))
    return out


@lru_cache(maxsize=None)
def monic_mvop(p: Params, n: int) -> MVOPData:
    """Monic P_n from the moment equations <P_n, x^k Id>_W = 0, k < n.

    Writing P_n = x^n Id + sum_{j<n} c_j x^j, the conditions read
    sum_j c_j S_{j+k} = -S_{n+k}; one exact linear solve per family, shared
    across rows.  The eigenfunction identity P_n.T0 = Gamma_n.P_n is checked
    before returning.
    """
    N = p.N
    S = [moments(p, k) for k in range(2 * n + 1)]
    if n == 0:
        P = MatPoly.identity(N)
    else:
        # unknown row vector per r: (c_j)_{r,u}; equation index (k,t)
        A = [[S[j + k][u][t] for j in range(n) for u in range(N)]
             for k in range(n) for t in range(N)]
        B = [[-S[n + k][r][t] for r in range(N)] for k in range(n) for t in range(N)]
        X = lin_solve(A, B)
        cs = []
        for j in range(n):
            cj = [[X[j * N + u][r] for u in range(N)] for r in range(N)]
            cs.append(MatPoly.from_const(cj))
        P = MatPoly.from_scalar(N, P_ONE.shift(n))
        for j, cj in enumerate(cs):
            P = P + cj * P_ONE.shift(j)
    # H_n = <P_n, x^n Id> by orthogonality
    Hm = None
    for j in range(n + 1):
        cj = P.coeff(j)
        term = _mat_mul(cj, S[j + n])
        Hm = term if Hm is None else tuple(tuple(a + b for a, b in zip(ra, rb))
                                           for ra, rb in zip(Hm, term))
    G = gamma_n(p, n)
    lhs = apply_right(build_T0(p), P).as_matpoly()
    if lhs != MatPoly.from_const(G) @ P:
        raise RuntimeError(f"eigenfunction identity failed for n={n}")
    return MVOPData(n=n, P=P, H=Hm, Gamma=G)


def ttr(p: Params, n: int) -> tuple[tuple[tuple[Fraction, ...], ...],
                                    tuple[tuple[Fraction, ...], ...]]:
    """Three-term recurrence x P_n = P_{n+1} + B_n P_n + C_n P_{n-1}.

    B_n and C_n are read off the top two coefficients of x P_n - P_{n+1} and
    the full identity is re-checked exactly before returning.  C_0 is zero by
    convention.
    """
    N = p.N
    Pn = monic_mvop(p, n).P
    Pn1 = monic_mvop(p, n + 1).P
    R = Pn * P_X - Pn1
    Bn = R.coeff(n)
    rem = R - MatPoly.from_const(Bn) @ Pn
    if n == 0:
        Cn = tuple(tuple(Fraction(0) for _ in range(N)) for _ in range(N))
        ok = rem.is_zero()
    else:
        Cn = rem.coeff(n - 1)
        ok = (rem - MatPoly.from_const(Cn) @ monic_mvop(p, n - 1).P).is_zero()
    if not ok:
        raise RuntimeError(f"three-term recurrence reconstruction failed at n={n}")
    return Bn, Cn
