"""Generalized Gauss-Laguerre quadrature in arbitrary precision.

Nodes and weights for the probability-normalized measure
x^nu e^(-x) dx / Gamma(nu+1) on (0, inf).  The three-term recurrence
coefficients (a_k = 2k+nu+1, b_k = sqrt(k(k+nu))) define the Jacobi matrix;
instead of an extended-precision eigensolve (hopeless in pure Python at order
2048) we take double-precision nodes as initial guesses and polish them with
Newton iterations on the orthonormal recurrence, which converges to full
working precision in a handful of steps.  Weights are Christoffel numbers
w_i = 1 / sum_k p_k(x_i)^2, which for the normalized measure sum to 1.

Normalization matters: with the Gamma(nu+1) factor divided out, quadrature
values are directly comparable to the exact rational moment tables used
elsewhere (which carry the same normalization).

The O(order^2) recurrence loops run on raw gmpy2.mpfr (the mpmath wrapper
costs ~6x on top of the same backend); results convert to mpmath at the
boundary.  Everything is cached per (nu, order, precision).
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import mpmath as mp

_cache: dict[tuple, tuple] = {}


def _to_mpf(g) -> mp.mpf:
    """Exact gmpy2.mpfr -> mpmath.mpf conversion via mantissa/exponent."""
    if g == 0:
        return mp.mpf(0)
    m, e = g.as_mantissa_exp()
    return mp.ldexp(mp.mpf(int(m)), int(e))


def nodes_weights(nu: Fraction, order: int, prec: int):
    """Quadrature nodes and weights at `prec` bits, cached per (nu, order, prec)."""
    nu = Fraction(nu)
    key = (nu, order, prec)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    import numpy as np
    from scipy.linalg import eigh_tridiagonal

    # double-precision Jacobi-matrix eigenvalues as Newton starting points
    nuf64 = float(nu)
    diag = np.array([2 * k + nuf64 + 1 for k in range(order)])
    off = np.array([np.sqrt(k * (k + nuf64)) for k in range(1, order)])
    x0 = eigh_tridiagonal(diag, off, eigvals_only=True)
    wp = prec + 20
    ctx = gmpy2.context(gmpy2.get_context())
    ctx.precision = wp
    with ctx:
        nuf = gmpy2.mpfr(nu.numerator) / nu.denominator
        a = [2 * k + nuf + 1 for k in range(order)]
        b = [gmpy2.sqrt(k * (k + nuf)) for k in range(order + 1)]  # b[0] unused
        one, zero = gmpy2.mpfr(1), gmpy2.mpfr(0)
        tol = gmpy2.exp2(-prec - 5)

        def eval_pn(x):
            # orthonormal p_order and its derivative at x
            pm1, p0, dm1, d0 = zero, one, zero, zero
            for k in range(order):
                xa = x - a[k]
                bk1 = b[k + 1]
                if k:
                    bk = b[k]
                    p1 = (xa * p0 - bk * pm1) / bk1
                    d1 = (p0 + xa * d0 - bk * dm1) / bk1
                else:
                    p1 = xa * p0 / bk1
                    d1 = (p0 + xa * d0) / bk1
                pm1, p0, dm1, d0 = p0, p1, d0, d1
            return p0, d0

        nodes = []
        for xi in x0:
            x = gmpy2.mpfr(float(xi))
            last = None
            for _ in range(50):
                p, d = eval_pn(x)
                dx = p / d
                x -= dx
                adx = abs(dx)
                if adx <= tol * max(one, abs(x)):
                    break
                if last is not None and adx >= last:
                    break  # rounding floor reached
                last = adx
            nodes.append(x)

        weights = []
        for x in nodes:
            pm1, p0 = zero, one
            s = one  # p_0^2
            for k in range(order - 1):
                xa = x - a[k]
                if k:
                    p1 = (xa * p0 - b[k] * pm1) / b[k + 1]
                else:
                    p1 = xa * p0 / b[k + 1]
                s += p1 * p1
                pm1, p0 = p0, p1
            weights.append(1 / s)

        out = (tuple(_to_mpf(x) for x in nodes),
               tuple(_to_mpf(w) for w in weights))
    _cache[key] = out
    return out


def integrate(f, nu: Fraction, order: int, prec: int):
    """Sum of w_i f(x_i); f maps an mpf to a scalar or nested-list matrix."""
    xs, ws = nodes_weights(nu, order, prec)
    with mp.workprec(prec + 20):
        acc = None
        for x, w in zip(xs, ws):
            v = f(x)
            if isinstance(v, (list, tuple)):
                t = [[w * e for e in row] for row in v]
                if acc is None:
                    acc = t
                else:
                    acc = [[ae + te for ae, te in zip(ar, tr)]
                           for ar, tr in zip(acc, t)]
            else:
                acc = w * v if acc is None else acc + w * v
        return acc


def _dist(a, b):
    if isinstance(a, (list, tuple)):
        return max(mp.fabs(ae - be) for ar, br in zip(a, b) for ae, be in zip(ar, br))
    return mp.fabs(a - b)


def _scale(a):
    if isinstance(a, (list, tuple)):
        return max(mp.fabs(e) for row in a for e in row)
    return mp.fabs(a)


def integrate_adaptive(f, nu: Fraction, prec: int, *, min_order: int = 64,
                       max_order: int = 2048, rtol=None):
    """Order-doubling quadrature: stop when two consecutive orders agree.

    Returns (value, error_estimate) with the estimate taken from the last
    doubling step; raises RuntimeError if max_order passes without meeting
    rtol (default 2^-(prec/2), relative to max(1, |result|))."""
    with mp.workprec(prec + 20):
        if rtol is None:
            rtol = mp.mpf(2) ** (-(prec // 2))
        prev = None
        order = min_order
        while order <= max_order:
            cur = integrate(f, nu, order, prec)
            if prev is not None:
                err = _dist(cur, prev)
                if err <= rtol * max(mp.mpf(1), _scale(cur)):
                    return cur, err
            prev = cur
            order *= 2
        raise RuntimeError(f"quadrature did not stabilize by order {max_order}")
