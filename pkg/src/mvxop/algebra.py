"""Exact arithmetic substrate: rationals, polynomials, matrix polynomials.

Everything in this module is immutable and exact.  Scalars are
`fractions.Fraction`; polynomials are coefficient tuples in ascending
degree; matrix polynomials are N×N grids of polynomials.  Floating point
never enters here — numeric evaluation helpers convert on the way out.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def pochhammer(a: Rat | int, k: int) -> Rat:
    """Rising factorial (a)_k = a(a+1)...(a+k-1), with (a)_0 = 1."""
    if k < 0:
        raise ValueError("pochhammer needs k >= 0")
    out = ONE
    a = Fraction(a)
    for i in range(k):
        out *= a + i
    return out


def _as_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


def rat_str(x: Rat) -> str:
    """Serialize a rational as 'p/q' with explicit positive denominator."""
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Scalar polynomial over Q, coefficients ascending, trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def const(c) -> "Poly":
        return Poly((c,))

    @staticmethod
    def x(power: int = 1) -> "Poly":
        return Poly((0,) * power + (1,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def __add__(self, other) -> "Poly":
        other = _coerce_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce_poly(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = _as_frac(other)
            return Poly(tuple(c * a for a in self.coeffs))
        if isinstance(other, Poly):
            if not self.coeffs or not other.coeffs:
                return Poly()
            out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        out[i + j] += a * b
            return Poly(out)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if not self.coeffs:
            return self
        return Poly((ZERO,) * k + self.coeffs)

    def deriv(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        return self * (ONE / lc)

    def __call__(self, x):
        """Evaluate by Horner; exact for Fraction input, numeric otherwise."""
        out = x * 0  # matches the arithmetic type of x
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def eval_mp(self, x):
        """Evaluate at an mpmath number (or complex) without float round-off
        in the coefficients: each Fraction converts as num/den in the
        working precision."""
        import mpmath as mp

        out = mp.mpf(0) * x if not isinstance(x, complex) else 0 * x
        for c in reversed(self.coeffs):
            out = out * x + mp.mpf(c.numerator) / mp.mpf(c.denominator)
        return out

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Poly(" + " + ".join(terms) + ")"

    def to_json(self) -> list[str]:
        return [rat_str(c) for c in self.coeffs]

    @staticmethod
    def from_json(data: Sequence) -> "Poly":
        return Poly(tuple(Fraction(s) for s in data))


def _coerce_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Poly")


P_ZERO = Poly()
P_ONE = Poly.const(1)
P_X = Poly.x()


def poly_divrem(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Exact division with remainder: a = q*b + r, deg r < deg b."""
    if b.is_zero():
        raise ZeroDivisionError("poly_divrem by zero polynomial")
    r = list(a.coeffs)
    db, lb = b.degree, b.coeffs[-1]
    q = [ZERO] * max(0, len(r) - db)
    for k in range(len(r) - db - 1, -1, -1):
        c = r[k + db] / lb
        if c:
            q[k] = c
            for j, bc in enumerate(b.coeffs):
                r[k + j] -= c * bc
    return Poly(q), Poly(r[:db] if db > 0 else ())


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, poly_divrem(a, b)[1]
    return a.monic() if not a.is_zero() else a


class MatPoly:
    """N×N matrix with Poly entries, i.e. a matrix polynomial."""

    __slots__ = ("n", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(_coerce_poly(e) for e in row) for row in entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("MatPoly must be square")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):
        raise AttributeError("MatPoly is immutable")

    @staticmethod
    def identity(n: int) -> "MatPoly":
        return MatPoly([[P_ONE if i == j else P_ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(n: int) -> "MatPoly":
        return MatPoly([[P_ZERO] * n for _ in range(n)])

    @staticmethod
    def from_scalar(n: int, p) -> "MatPoly":
        """p(x) * Id."""
        p = _coerce_poly(p)
        return MatPoly([[p if i == j else P_ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def from_const(mat: Sequence[Sequence]) -> "MatPoly":
        """Constant matrix of rationals, promoted to degree-0 polynomials."""
        return MatPoly([[Poly.const(c) for c in row] for row in mat])

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, MatPoly) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    @property
    def degree(self) -> int:
        return max((e.degree for row in self.entries for e in row), default=-1)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __add__(self, other) -> "MatPoly":
        other = self._coerce(other)
        return MatPoly([[self.entries[i][j] + other.entries[i][j]
                         for j in range(self.n)] for i in range(self.n)])

    __radd__ = __add__

    def __neg__(self) -> "MatPoly":
        return MatPoly([[-e for e in row] for row in self.entries])

    def __sub__(self, other) -> "MatPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MatPoly":
        return self._coerce(other) + (-self)

    def _coerce(self, other) -> "MatPoly":
        if isinstance(other, MatPoly):
            if other.n != self.n:
                raise ValueError("size mismatch")
            return other
        if isinstance(other, (int, Fraction, Poly)):
            return MatPoly.from_scalar(self.n, other)
        raise TypeError(f"cannot combine MatPoly with {type(other).__name__}")

    def __mul__(self, other):
        """Scalar (Rat or Poly) multiplication; use @ for matrix product."""
        if isinstance(other, (int, Fraction, Poly)):
            return MatPoly([[e * other for e in row] for row in self.entries])
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "MatPoly") -> "MatPoly":
        other = self._coerce(other)
        n = self.n
        out = [[P_ZERO] * n for _ in range(n)]
        for i in range(n):
            for k in range(n):
                a = self.entries[i][k]
                if a.is_zero():
                    continue
                for j in range(n):
                    b = other.entries[k][j]
                    if not b.is_zero():
                        out[i][j] = out[i][j] + a * b
        return MatPoly(out)

    def transpose(self) -> "MatPoly":
        return MatPoly([[self.entries[j][i] for j in range(self.n)] for i in range(self.n)])

    def deriv(self) -> "MatPoly":
        return MatPoly([[e.deriv() for e in row] for row in self.entries])

    def coeff(self, k: int) -> tuple[tuple[Fraction, ...], ...]:
        """k-th coefficient matrix as a grid of rationals."""
        return tuple(tuple(e[k] for e in row) for row in self.entries)

    def leading(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.coeff(self.degree) if self.degree >= 0 else self.coeff(0)

    def __call__(self, x):
        return tuple(tuple(e(x) for e in row) for row in self.entries)

    def __repr__(self):
        return f"MatPoly(n={self.n}, deg={self.degree})"

    def to_json(self) -> dict:
        d = max(self.degree, 0)
        return {
            "n": self.n,
            "deg": self.degree,
            "coeffs": [
                [[rat_str(self.entries[i][j][k]) for j in range(self.n)]
                 for i in range(self.n)]
                for k in range(d + 1)
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "MatPoly":
        n = data["n"]
        mats = data["coeffs"]
        entries = [[Poly(tuple(Fraction(mats[k][i][j]) for k in range(len(mats))))
                    for j in range(n)] for i in range(n)]
        return MatPoly(entries)


def mat_det(P: MatPoly) -> Poly:
    """Exact determinant.

    Cofactor expansion for n <= 4; fraction-free Bareiss elimination with
    row pivoting above that (division steps in Bareiss are exact).
    """
    n = P.n
    if n <= 4:
        return _det_cofactor(P.entries)
    a = [list(row) for row in P.entries]
    sign = 1
    prev = P_ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if piv is None:
                return P_ZERO
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                q, r = poly_divrem(num, prev)
                assert r.is_zero(), "Bareiss division must be exact"
                a[i][j] = q
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _det_cofactor(rows) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    det = P_ZERO
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_cofactor(minor)
        det = det + term if j % 2 == 0 else det - term
    return det


def mat_adjugate(P: MatPoly) -> MatPoly:
    """Classical adjoint: P @ adj(P) = det(P) * Id exactly.  adj of 1x1 is [1]."""
    n = P.n
    if n == 1:
        return MatPoly.identity(1)
    rows = P.entries
    adj = [[P_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for ri, row in enumerate(rows) if ri != i]
            c = _det_cofactor(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c  # transposed cofactor
    return MatPoly(adj)


class RatMatFun:
    """Matrix polynomial divided by a scalar polynomial, kept reduced.

    Normalization: the denominator is monic and shares no common factor
    with the gcd of all numerator entries.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MatPoly, den: Poly = P_ONE, *, reduce: bool = True):
        den = _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("RatMatFun with zero denominator")
        if reduce:
            g = den
            for row in num.entries:
                for e in row:
                    if g.degree < 1:
                        break
                    if not e.is_zero():
                        g = poly_gcd(g, e)
            if g.degree >= 1:
                den = poly_divrem(den, g)[0]
                num = MatPoly([[poly_divrem(e, g)[0] for e in row] for row in num.entries])
            lc = den.coeffs[-1]
            if lc != 1:
                den = den * (ONE / lc)
                num = num * (ONE / lc)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RatMatFun is immutable")

    @property
    def n(self) -> int:
        return self.num.n

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_matpoly(self) -> MatPoly:
        """Exact conversion; raises if the denominator does not divide."""
        if self.den.degree == 0:
            return self.num * (ONE / self.den.coeffs[0])
        out = []
        for row in self.num.entries:
            orow = []
            for e in row:
                q, r = poly_divrem(e, self.den)
                if not r.is_zero():
                    raise ValueError("RatMatFun is not polynomial")
                orow.append(q)
            out.append(orow)
        return MatPoly(out)

    def __eq__(self, other) -> bool:
        """Exact equality as rational functions (cross-multiplied)."""
        if isinstance(other, RatMatFun):
            return (self.num * other.den) == (other.num * self.den)
        if isinstance(other, MatPoly):
            return self.num == other * self.den
        return NotImplemented

    def __add__(self, other) -> "RatMatFun":
        other = _coerce_rmf(other, self.n)
        return RatMatFun(self.num * other.den + other.num * self.den,
                         self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatMatFun":
        return RatMatFun(-self.num, self.den, reduce=False)

    def __sub__(self, other) -> "RatMatFun":
        return self + (-_coerce_rmf(other, self.n))

    def __matmul__(self, other) -> "RatMatFun":
        other = _coerce_rmf(other, self.n)
        return RatMatFun(self.num @ other.num, self.den * other.den)

    def __mul__(self, other) -> "RatMatFun":
        if isinstance(other, (int, Fraction, Poly)):
            return RatMatFun(self.num * other, self.den)
        return NotImplemented

    __rmul__ = __mul__

    def deriv(self) -> "RatMatFun":
        return RatMatFun(self.num.deriv() * self.den - self.num * self.den.deriv(),
                         self.den * self.den)

    def __repr__(self):
        return f"RatMatFun(n={self.n}, num_deg={self.num.degree}, den_deg={self.den.degree})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data: dict) -> "RatMatFun":
        return RatMatFun(MatPoly.from_json(data["num"]), Poly.from_json(data["den"]))


def _coerce_rmf(x, n: int) -> RatMatFun:
    if isinstance(x, RatMatFun):
        if x.n != n:
            raise ValueError("size mismatch")
        return x
    if isinstance(x, MatPoly):
        return RatMatFun(x, P_ONE, reduce=False)
    if isinstance(x, (int, Fraction, Poly)):
        return RatMatFun(MatPoly.from_scalar(n, x), P_ONE, reduce=False)
    raise TypeError(f"cannot coerce {type(x).__name__} to RatMatFun")


def lin_solve(A: list[list[Fraction]], B: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve A X = B exactly over Q (Gaussian elimination, first-nonzero pivot).

    A is square s x s, B is s x t; returns X as s x t.  Raises on singular A.
    """
    s = len(A)
    t = len(B[0]) if B else 0
    M = [list(map(_as_frac, A[i])) + list(map(_as_frac, B[i])) for i in range(s)]
    for col in range(s):
        piv = next((r for r in range(col, s) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = ONE / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(s):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[s:] for row in M]


def sturm_chain(p: Poly) -> list[Poly]:
    """Sturm sequence p, p', -rem(p, p'), ... over Q."""
    chain = [p, p.deriv()]
    while not chain[-1].is_zero() and chain[-1].degree > 0:
        r = poly_divrem(chain[-2], chain[-1])[1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _sign_variations(vals) -> int:
    signs = [1 if v > 0 else -1 for v in vals if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count_nonneg(p: Poly) -> int:
    """Number of distinct real roots of p in [0, inf)."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    g = poly_gcd(p, p.deriv())
    if g.degree > 0:  # square-free part counts distinct roots
        p = poly_divrem(p, g)[0]
    chain = sturm_chain(p)
    at0 = _sign_variations([q(ZERO) for q in chain])
    atinf = _sign_variations([q.coeffs[-1] for q in chain if not q.is_zero()])
    count = at0 - atinf  # roots in (0, inf)
    if p(ZERO) == 0:
        count += 1
    return count


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, no float formatting surprises."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
