from fractions import Fraction as F

import mpmath as mp
import pytest

from mvxop.algebra import MatPoly, P_ONE, P_X, Poly, mat_det
from mvxop.exceptional import (
    _diag_seed,
    _minors_positive,
    adjoint_residual,
    build_xweight,
    diag_gamma,
    diagonal_route,
    inner_weight_quad,
    inner_xweight,
    lowered,
    verify_adjoint_identity,
    verify_diagonal,
    verify_eigen_T1,
    verify_lowering,
    verify_orthogonality,
    verify_pearson,
    verify_symmetry,
    xpoly,
)
from mvxop.laguerre import (
    Params,
    build_weight,
    monic_mvop,
    scalar_laguerre,
    t0_matrices,
)
from mvxop.rightops import RightDiffOp, apply_right, quasi_derivative
from mvxop.seed import _phi_of, build_Am, build_Bm, build_seed, lam

ALPHA, NU = F(7, 2), F(5, 2)


def params(N, m, **kw):
    return Params(N=N, alpha=ALPHA, nu=NU, mu=tuple(range(1, N + 1)),
                  delta=tuple([1] * N), m=m, **kw)


P11 = params(1, 1)
P21 = params(2, 1)
P32 = params(3, 2)
GRID = [params(N, m) for N in (1, 2, 3) for m in (0, 1, 2)]


def test_xweight_shape():
    xw = build_xweight(P21)
    sd = build_seed(P21)
    assert xw.denomScalar == (sd.detF * sd.detF).shift(1)
    assert xw.denomScalar.degree == 2 * P21.m * P21.N + 1
    assert xw.base == build_weight(P21)
    # m=0, N=1: the weight is just x^(nu) e^-x up to a positive constant
    xw0 = build_xweight(params(1, 0))
    with mp.workprec(80):
        got = xw0.eval_mp(mp.mpf(2))[0][0]
        c = xw0.eval_mp(mp.mpf(1))[0][0] / mp.exp(mp.mpf(-1))
        want = c * mp.mpf(2) ** mp.mpf("2.5") * mp.exp(mp.mpf(-2))
        assert abs(got - want) < mp.mpf(10) ** -18


def test_xweight_positive_at_samples():
    # positive definite at sample points: exact minors of V(x0), with the
    # scalar prefactor x0^(nu-s) e^-x0 / (x0 detF(x0)^2) positive
    xw = build_xweight(P32)
    sd = build_seed(P32)
    for x0 in (F(1, 2), F(1), F(10)):
        assert sd.detF(x0) != 0
        vals = xw.base.V(x0)
        assert _minors_positive(vals)


def test_xweight_rejects_uncertified():
    q = Params(N=1, alpha=ALPHA, nu=F(1, 2), mu=(1,), delta=(1,), m=2,
               allow_small_nu=True)
    with pytest.raises(ValueError):
        build_xweight(q)


def test_xpoly_base_case():
    # P_0 = Id, so Phat_0 is minus the log-derivative polynomial
    for p in (P11, P21):
        d = xpoly(p, 0)
        assert d.Phat == -build_seed(p).Phi


def test_xpoly_degrees_and_norms():
    for n in range(6):
        d = xpoly(P21, n)
        assert d.Phat.degree == P21.m * P21.N + n
        # Hhat agreement between the two orderings and with the eigenvalues
        data = monic_mvop(P21, n)
        lamG = MatPoly.identity(2) * lam(P21) - MatPoly.from_const(data.Gamma)
        H = MatPoly.from_const(data.H)
        assert (lamG @ H).coeff(0) == d.Hhat
        assert (H @ lamG.transpose()).coeff(0) == d.Hhat
        assert tuple(zip(*d.Hhat)) == d.Hhat
        assert _minors_positive(d.Hhat)
        # diagonal of lam - Gamma_n is nu + n + j - m, all positive
        for j in range(P21.N):
            assert lamG[j, j][0] == NU + n + (j + 1) - P21.m > 0


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_lowering(p):
    top = 3 if p.N < 3 else 2
    for n in range(top + 1):
        assert verify_lowering(p, n)


def test_lowering_negative_control():
    # a wrong eigenvalue shift must not satisfy the lowering identity
    p = P21
    img = apply_right(build_Bm(p), xpoly(p, 1).Phat).as_matpoly()
    data = monic_mvop(p, 1)
    wrong = (MatPoly.from_const(data.Gamma)
             - MatPoly.identity(2) * (lam(p) + 1)) @ data.P
    assert img != wrong
    assert img == lowered(p, 1)


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_eigen_T1(p):
    top = 3 if p.N < 3 else 2
    for n in range(top + 1):
        assert verify_eigen_T1(p, n)


def test_eigen_T1_negative_control():
    from mvxop.algebra import RatMatFun
    from mvxop.seed import build_T1

    p = P21
    Phat = xpoly(p, 1).Phat
    Gwrong = MatPoly.from_const(monic_mvop(p, 2).Gamma)
    assert apply_right(build_T1(p), Phat) != RatMatFun(Gwrong @ Phat, P_ONE)


def test_factorization_consistency():
    # Phat_n . B . A = (Gamma_n - lam) Phat_n
    for p in (P11, P21):
        for n in range(3):
            d = xpoly(p, n)
            G = MatPoly.from_const(monic_mvop(p, n).Gamma) \
                - MatPoly.identity(p.N) * lam(p)
            back = apply_right(build_Am(p), lowered(p, n)).as_matpoly()
            assert back == G @ d.Phat


def test_gauge_invariance_lower_triangular():
    # replacing the seed by M . (seed) for constant invertible lower-
    # triangular M with det 1 leaves Phi, hence A and every Phat, unchanged;
    # in polynomial form the new seed matrix is x^(nu+J) M x^(-nu-J) F
    sd = build_seed(P21)
    S = MatPoly([[P_ONE, Poly()], [P_X * 3, P_ONE]])
    assert _phi_of(S @ sd.F, NU) == sd.Phi
    assert mat_det(S @ sd.F) == sd.detF

    sd3 = build_seed(params(3, 1))
    S3 = MatPoly([
        [P_ONE, Poly(), Poly()],
        [P_X * 2, P_ONE, Poly()],
        [P_X.shift(1) * 5, P_X * -3, P_ONE],
    ])
    assert _phi_of(S3 @ sd3.F, NU) == sd3.Phi


def test_orthogonality_quadrature():
    ok, worst = verify_orthogonality(P21, K=2, prec=140)
    assert ok
    assert worst < 1e-8
    ok1, worst1 = verify_orthogonality(P11, K=3, prec=140)
    assert ok1


def test_offdiagonal_entry_quadrature():
    # one explicit pair: <Phat_2, Phat_0> vanishes, <Phat_2, Phat_2> = Hhat_2
    d0, d2 = xpoly(P21, 0), xpoly(P21, 2)
    g20, _ = inner_xweight(P21, d2.Phat, d0.Phat, prec=140)
    hnorm = max(abs(mp.mpf(v.numerator) / mp.mpf(v.denominator))
                for row in d2.Hhat for v in row)
    assert max(abs(e) for row in g20 for e in row) < 1e-10 * hnorm
    g22, _ = inner_xweight(P21, d2.Phat, d2.Phat, prec=140)
    for rg, rw in zip(g22, d2.Hhat):
        for g, w in zip(rg, rw):
            wm = mp.mpf(w.numerator) / mp.mpf(w.denominator)
            assert abs(g - wm) <= 1e-10 * hnorm


def test_plain_weight_quadrature_sanity():
    # polynomial integrand: quadrature against the exact moments to 1e-12
    data = monic_mvop(P21, 2)
    got, _ = inner_weight_quad(P21, data.P, data.P, prec=140)
    hnorm = max(abs(mp.mpf(v.numerator) / mp.mpf(v.denominator))
                for row in data.H for v in row)
    for rg, rw in zip(got, data.H):
        for g, w in zip(rg, rw):
            wm = mp.mpf(w.numerator) / mp.mpf(w.denominator)
            assert abs(g - wm) <= 1e-12 * max(1, hnorm)


def test_adjoint_identity():
    for n, k in ((0, 0), (1, 0), (1, 1), (2, 1)):
        assert verify_adjoint_identity(P21, n, k, prec=150)


def test_adjoint_monomial_and_negative_control():
    X = MatPoly.from_scalar(2, P_X)
    I = MatPoly.identity(2)
    assert adjoint_residual(P21, X, I, prec=150) < 1e-30
    assert adjoint_residual(P21, X, X, prec=150) < 1e-30
    # dropping the boundary factor x from the gauge polynomial is detected
    assert adjoint_residual(P21, X, I, drop_boundary_factor=True) > 1


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_symmetry(p):
    assert verify_symmetry(p)


def test_symmetry_scalar_reduction():
    # N = 1 the second equation is the scalar Pearson equation
    # (x w)' = (nu + 2 - x) w
    p = params(1, 0)
    W = build_weight(p)
    xW = W.lmul(MatPoly.from_scalar(1, P_X))
    pear = W.lmul(MatPoly([[Poly([NU + 2, -1])]]))
    assert quasi_derivative(xW) == pear


def test_symmetry_negative_control():
    p = P21
    W = build_weight(p)
    M1, M2, _ = t0_matrices(p)
    bad = M1 * P_X + M2 + MatPoly.identity(2)
    two = MatPoly.identity(2) * F(2)
    lhs = quasi_derivative(W.lmul(MatPoly.from_scalar(2, P_X))).lmul(two)
    assert lhs != W.rmul(bad.transpose()) + W.lmul(bad)


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_pearson(p):
    assert verify_pearson(p)


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_diagonal_route(p):
    for n in (1, 2):
        assert verify_diagonal(p, n)


def test_diag_gamma_values():
    got = diag_gamma(P21, 3)
    assert got == ((ALPHA - NU - 4, F(0)), (F(0), ALPHA - NU - 5))


def test_diagonal_entries_are_scalar_exceptional():
    # c (P^d A^d)_ii = prod_{p != i} f_p [x f_i p_i' - p_i (x f_i' - (nu+i) f_i)]
    p = P21
    Fd, c = _diag_seed(p)
    Phid = _phi_of(Fd, p.nu) * (1 / c)
    Ad = RightDiffOp([-Phid, MatPoly.from_scalar(p.N, build_seed(p).Upsilon)])
    n = 2
    Pd = MatPoly([[scalar_laguerre(n, p.nu + (i + 1)).monic() if i == j else Poly()
                   for j in range(p.N)] for i in range(p.N)])
    PdAd = apply_right(Ad, Pd).as_matpoly()
    for i in range(p.N):
        fi, pi = Fd[i, i], Pd[i, i]
        bracket = (pi.deriv() * fi).shift(1) \
            - pi * (fi.deriv().shift(1) - fi * (p.nu + i + 1))
        others = P_ONE
        for q in range(p.N):
            if q != i:
                others = others * Fd[q, q]
        assert PdAd[i, i] * c == bracket * others


def test_diagonal_orthogonality_quadrature():
    Q1 = diagonal_route(P21, 1)
    Q2 = diagonal_route(P21, 2)
    g, _ = inner_xweight(P21, Q2, Q1, prec=140)
    gd, _ = inner_xweight(P21, Q1, Q1, prec=140)
    scale = max(abs(e) for row in gd for e in row)
    assert max(abs(e) for row in g for e in row) < 1e-10 * scale


def test_json_blobs():
    xw = build_xweight(P21)
    assert set(xw.to_json()) == {"V", "nu", "shift", "denomScalar"}
    d = xpoly(P21, 1)
    blob = d.to_json()
    assert blob["n"] == 1
    assert MatPoly.from_json(blob["Phat"]) == d.Phat
