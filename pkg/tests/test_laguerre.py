from fractions import Fraction as F

import pytest

from mvxop.algebra import MatPoly, Poly, mat_det, pochhammer
from mvxop.laguerre import (
    MVOPData,
    Params,
    build_L,
    build_T0,
    build_weight,
    gamma_n,
    moments,
    monic_mvop,
    scalar_laguerre,
    ttr,
)
from mvxop.rightops import apply_right

ALPHA, NU = F(7, 2), F(5, 2)


def params(N, mu=None, delta=None, m=0):
    return Params(N=N, alpha=ALPHA, nu=NU,
                  mu=tuple(mu or range(1, N + 1)),
                  delta=tuple(delta or [1] * N), m=m)


P1 = params(1, mu=(1,))
P2 = params(2, mu=(1, 2))
P3 = params(3, mu=(1, 2, 3))


def test_params_validation():
    with pytest.raises(ValueError):
        Params(N=1, alpha=F(-1), nu=NU, mu=(1,), delta=(1,))
    with pytest.raises(ValueError):
        Params(N=1, alpha=ALPHA, nu=F(1, 2), mu=(1,), delta=(1,), m=2)  # nu <= m-1
    with pytest.raises(ValueError):
        Params(N=1, alpha=F(1), nu=NU, mu=(1,), delta=(1,), m=2)  # integer alpha < m
    with pytest.raises(ValueError):
        Params(N=2, alpha=ALPHA, nu=NU, mu=(1, 0), delta=(1, 1))
    with pytest.raises(ValueError):
        Params(N=2, alpha=ALPHA, nu=NU, mu=(1, 1), delta=(1, -1))
    # escape hatch for zero-pattern runs only
    q = Params(N=1, alpha=ALPHA, nu=F(1, 2), mu=(1,), delta=(1,), m=2,
               allow_small_nu=True)
    assert q.nu == F(1, 2)


def test_scalar_laguerre_small():
    b = F(7, 3)
    assert scalar_laguerre(0, b) == Poly([1])
    assert scalar_laguerre(1, b) == Poly([b + 1, -1])
    # L_2^(b) = (b+1)(b+2)/2 - (b+2)x + x^2/2
    assert scalar_laguerre(2, b) == Poly([(b + 1) * (b + 2) / 2, -(b + 2), F(1, 2)])


def test_build_L_entries():
    L = build_L(P2)
    assert L[0, 0] == Poly([1]) and L[1, 1] == Poly([1]) and L[0, 1].is_zero()
    # subdiagonal is (mu2/mu1) * (alpha + 2 - x)
    assert L[1, 0] == Poly([ALPHA + 2, -1]) * F(2, 1)
    assert mat_det(build_L(P3)) == Poly([1])


def test_weight_N1_scalar_form():
    w = build_weight(P1)
    # delta x^(nu+1) e^-x: normalized V = Id at shift -1
    assert w.shift == -1
    assert w.V == MatPoly.identity(1)


def test_weight_positive_definite_samples():
    for p in (P2, P3):
        w = build_weight(p)
        for x0 in (F(1, 2), F(1), F(10)):
            g = w.V(x0)
            # leading principal minors of the symmetric rational matrix
            for k in range(1, p.N + 1):
                sub = MatPoly.from_const([row[:k] for row in g[:k]])
                assert mat_det(sub)[0] > 0
        assert w.V == w.V.transpose()


# Frozen oracle (independent symbolic integration of x^k L D L^T x^nu e^-x):
# params N=2, alpha=7/2, nu=5/2, mu=(1,2), delta=(1,1)
S0_ORACLE = ((F(7, 2), F(7)), (F(7), F(371, 4)))
S1_ORACLE = ((F(63, 4), F(0)), (F(0), F(3465, 8)))
S2_ORACLE = ((F(693, 8), F(-693, 4)), (F(-693, 4), F(50589, 16)))
B0_ORACLE = ((F(53, 10), F(-2, 5)), (F(-11), F(11, 2)))
H1_ORACLE = ((F(63, 20), F(0)), (F(0), F(6237, 8)))


def test_moments_frozen_N2():
    assert moments(P2, 0) == S0_ORACLE
    assert moments(P2, 1) == S1_ORACLE
    assert moments(P2, 2) == S2_ORACLE


def test_moments_N1_pochhammer():
    for k in range(6):
        assert moments(P1, k) == ((pochhammer(NU + 1, k + 1),),)


def test_moments_S0_positive_definite():
    p = params(2, mu=(1, 1))
    S0 = moments(p, 0)
    assert S0[0][0] > 0
    assert S0[0][0] * S0[1][1] - S0[0][1] * S0[1][0] > 0


def test_moments_match_quadrature():
    import mpmath as mp

    from mvxop.quad import integrate

    w = build_weight(P2)
    s = w.shift  # -1 after normalization; V carries the rest

    with mp.workprec(140):
        for k in (0, 3):
            S = moments(P2, k)

            def f(x, k=k):
                v = [[e.eval_mp(x) for e in row] for row in w.V.entries]
                scale = mp.power(x, -s) * x**k
                return [[scale * e for e in row] for row in v]

            got = integrate(f, NU, 128, 120)
            for i in range(2):
                for j in range(2):
                    want = mp.mpf(S[i][j].numerator) / mp.mpf(S[i][j].denominator)
                    assert mp.fabs(got[i][j] - want) <= mp.mpf(1e-12) * max(1, mp.fabs(want))


def test_T0_N1_classical_form():
    T0 = build_T0(P1)
    assert T0.order == 2
    assert T0.coeff(2).num == MatPoly.from_scalar(1, Poly([0, 1]))
    assert T0.coeff(1).num == MatPoly.from_scalar(1, Poly([NU + 2, -1]))
    assert T0.coeff(0).num == MatPoly.from_scalar(1, Poly([ALPHA - NU - 1]))


def test_T0_coefficient_degrees():
    T0 = build_T0(P3)
    assert [T0.coeff(j).num.degree for j in (2, 1, 0)] == [1, 1, 0]
    assert T0.is_polynomial()


def test_gamma_n_values():
    assert gamma_n(P1, 3) == ((-3 + ALPHA - NU - 1,),)
    for n in (0, 2, 5):
        G = gamma_n(P3, n)
        # lower triangular; diagonal = spectrum {-n+alpha-nu-j}
        assert all(G[i][j] == 0 for i in range(3) for j in range(3) if j > i)
        assert [G[i][i] for i in range(3)] == [-n + ALPHA - NU - (i + 1) for i in range(3)]
        # alpha - m never an eigenvalue while nu > m-1
        for m in (0, 1, 2):
            assert all(G[i][i] != ALPHA - m for i in range(3))


def test_monic_mvop_P0_P1():
    d0 = monic_mvop(P2, 0)
    assert d0.P == MatPoly.identity(2)
    assert d0.H == S0_ORACLE
    d1 = monic_mvop(P2, 1)
    assert d1.P.coeff(1) == ((F(1), F(0)), (F(0), F(1)))
    assert d1.P.coeff(0) == tuple(tuple(-v for v in row) for row in B0_ORACLE)
    assert d1.H == H1_ORACLE


def test_monic_mvop_eigen_identity():
    # P_n . T0 = Gamma_n . P_n exactly (also asserted internally)
    for p in (P1, P2, P3):
        T0 = build_T0(p)
        for n in range(4):
            d = monic_mvop(p, n)
            lhs = apply_right(T0, d.P).as_matpoly()
            assert lhs == MatPoly.from_const(d.Gamma) @ d.P


def _pair(p, A, B):
    """<A, B>_W via exact moments."""
    N = p.N
    tot = [[F(0)] * N for _ in range(N)]
    for j in range(A.degree + 1):
        for k in range(B.degree + 1):
            S = moments(p, j + k)
            a, b = A.coeff(j), B.coeff(k)
            # a S b^T
            for i in range(N):
                for l in range(N):
                    tot[i][l] += sum(a[i][u] * S[u][v] * b[l][v]
                                     for u in range(N) for v in range(N))
    return tuple(tuple(row) for row in tot)


def test_mvop_orthogonality_and_H_spd():
    for p in (P2, P3):
        ds = [monic_mvop(p, n) for n in range(4)]
        for i, di in enumerate(ds):
            for j, dj in enumerate(ds):
                g = _pair(p, di.P, dj.P)
                if i != j:
                    assert all(v == 0 for row in g for v in row)
                else:
                    assert g == di.H
        for d in ds:
            # symmetric positive definite via leading principal minors
            H = MatPoly.from_const(d.H)
            assert H == H.transpose()
            for k in range(1, p.N + 1):
                sub = MatPoly.from_const([row[:k] for row in d.H[:k]])
                assert mat_det(sub)[0] > 0


def test_ttr_reconstruction():
    for p in (P1, P2, P3):
        for n in range(4):
            Bn, Cn = ttr(p, n)
            lhs = monic_mvop(p, n).P * Poly([0, 1])
            rhs = monic_mvop(p, n + 1).P + MatPoly.from_const(Bn) @ monic_mvop(p, n).P
            if n:
                rhs = rhs + MatPoly.from_const(Cn) @ monic_mvop(p, n - 1).P
            assert lhs == rhs


def test_ttr_B0_and_scalar_oracle():
    assert ttr(P2, 0)[0] == B0_ORACLE
    # N=1: monic Laguerre at parameter nu+1: B_n = 2n+nu+2, C_n = n(n+nu+1)
    for n in range(5):
        Bn, Cn = ttr(P1, n)
        assert Bn == ((2 * n + NU + 2,),)
        assert Cn == ((n * (n + NU + 1),),)


def test_mvopdata_json():
    d = monic_mvop(P2, 1)
    j = d.to_json()
    assert j["n"] == 1
    assert MatPoly.from_json(j["P"]) == d.P
    assert j["H"][0][0] == "63/20"
