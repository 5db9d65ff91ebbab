from fractions import Fraction as F
from math import factorial

import mpmath as mp
import pytest

from mvxop.algebra import (
    MatPoly,
    P_ONE,
    P_X,
    Poly,
    RatMatFun,
    mat_det,
    pochhammer,
    poly_divrem,
    sturm_count_nonneg,
)
from mvxop.laguerre import Params, build_T0, t0_matrices
from mvxop.rightops import RightDiffOp, apply_right, compose
from mvxop.seed import (
    SeedData,
    _phi_of,
    build_Am,
    build_Bm,
    build_seed,
    build_T1,
    detf_closed_form,
    indicial_exponents,
    lam,
    seed_coeff,
    seed_residual,
    verify_factorization,
    verify_seed,
)

ALPHA, NU = F(7, 2), F(5, 2)


def params(N, m, mu=None, nu=NU, **kw):
    return Params(N=N, alpha=ALPHA, nu=nu,
                  mu=tuple(mu or range(1, N + 1)),
                  delta=tuple([1] * N), m=m, **kw)


GRID = [params(N, m) for N in (1, 2, 3) for m in (0, 1, 2)]


def test_seed_coeff_basics():
    p = params(3, 2)
    assert seed_coeff(p, 1, 1, 0) == 1
    # strictly upper entries vanish
    assert seed_coeff(p, 1, 2, 0) == 0
    assert seed_coeff(p, 2, 3, 1) == 0
    # series truncates at k = m
    assert seed_coeff(p, 2, 1, 3) == 0
    with pytest.raises(ValueError):
        seed_coeff(p, 0, 1, 0)


def test_seed_coeff_diagonal_and_recursion():
    p = params(3, 1)
    for i in range(1, 4):
        want = F((-1) ** (i + 1)) * factorial(i - 1) * p.mu[0] \
            / (pochhammer(ALPHA + 2, i - 1) * p.mu[i - 1])
        assert seed_coeff(p, i, i, 0) == want
    # constant terms satisfy c_{i,j} = -((alpha+j+1)/(i-j)) (mu_{j+1}/mu_j) c_{i,j+1}
    for i in range(2, 4):
        for j in range(1, i):
            lhs = seed_coeff(p, i, j, 0)
            rhs = -((ALPHA + j + 1) / (i - j)) * (p.mu[j] / p.mu[j - 1]) \
                * seed_coeff(p, i, j + 1, 0)
            assert lhs == rhs


def test_seed_small_cases():
    # N = 1: single entry 1 + x/nu for m = 1, constant 1 for m = 0
    assert build_seed(params(1, 0)).F == MatPoly([[P_ONE]])
    assert build_seed(params(1, 1)).F == MatPoly([[Poly([1, F(2, 5)])]])
    # hand-computed N = 2, m = 1 seed at alpha = 7/2, nu = 5/2, mu = (1, 2)
    sd = build_seed(params(2, 1))
    want = MatPoly([
        [Poly([1, F(2, 5)]), Poly([])],
        [Poly([1, F(18, 77)]), Poly([F(-1, 11), F(-2, 77)])],
    ])
    assert sd.F == want
    assert sd.detF == mat_det(want)
    assert sd.Upsilon == sd.detF.shift(1)


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_detf_dual_route(p):
    sd = build_seed(p)
    assert sd.detF == detf_closed_form(p)
    assert sd.detF.degree == p.m * p.N
    # entries of F on and below the diagonal all have degree exactly m
    for i in range(p.N):
        for j in range(i + 1):
            assert sd.F[i, j].degree == p.m


def test_phi_diagonal_identity():
    # Phi_ii = ((-nu - i) F_ii + x F'_ii) prod_{p != i} F_pp
    p = params(3, 2)
    sd = build_seed(p)
    for i in range(p.N):
        fii = sd.F[i, i]
        others = P_ONE
        for q in range(p.N):
            if q != i:
                others = others * sd.F[q, q]
        want = (fii * (-p.nu - (i + 1)) + fii.deriv().shift(1)) * others
        assert sd.Phi[i, i] == want


def test_phi_degree_and_leading():
    for p in GRID:
        sd = build_seed(p)
        assert sd.Phi.degree == p.m * p.N
        lead = sd.Phi.coeff(p.m * p.N)
        for i in range(p.N):
            assert lead[i][i] != 0
            for j in range(i + 1, p.N):
                assert lead[i][j] == 0


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_verify_seed(p):
    assert verify_seed(p)


def test_verify_seed_other_mu():
    assert verify_seed(params(3, 2, mu=(F(2, 3), F(-1, 2), F(5))))


def test_tampered_seed_fails():
    # bumping the x-coefficient of entry (2,1) by 1 must break the equation
    p = params(2, 1)
    sd = build_seed(p)
    rows = [[sd.F[i, j] for j in range(2)] for i in range(2)]
    rows[1][0] = rows[1][0] + P_X
    assert not seed_residual(p, MatPoly(rows)).is_zero()
    assert seed_residual(p, sd.F).is_zero()


def test_first_order_ops_base_case():
    # N = 1, m = 0: A = d.x + (nu+1), B = d - 1, T1 = d^2.x + d.(nu+1-x) + alpha-nu-1
    p = params(1, 0)
    A, B = build_Am(p), build_Bm(p)
    assert A == RightDiffOp([MatPoly([[Poly([NU + 1])]]), MatPoly([[P_X]])])
    assert B == RightDiffOp([MatPoly([[Poly([-1])]]), MatPoly([[P_ONE]])])
    T1 = build_T1(p)
    want = RightDiffOp([
        MatPoly([[Poly([ALPHA - NU - 1])]]),
        MatPoly([[Poly([NU + 1, -1])]]),
        MatPoly([[P_X]]),
    ])
    assert T1 == want


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"N{p.N}m{p.m}")
def test_factorization_and_intertwining(p):
    A, B, T0 = build_Am(p), build_Bm(p), build_T0(p)
    assert compose(A, B) + lam(p) == T0
    T1 = build_T1(p)
    assert compose(B, A) + lam(p) == T1
    assert compose(A, T1) == compose(T0, A)
    assert compose(T1, B) == compose(B, T0)
    assert verify_factorization(p)


def test_T1_shape():
    for p in (params(2, 1), params(3, 2)):
        T1 = build_T1(p)
        assert T1.order == 2
        # leading coefficient is exactly x Id
        assert T1.coeff(2) == MatPoly.from_scalar(p.N, P_X)
        # lower coefficients are rational with denominators built from x detF
        sd = build_seed(p)
        for j in (0, 1):
            den = T1.coeff(j).den
            prod = sd.Upsilon * sd.detF
            # den divides (x detF^2)^2 after reduction
            assert poly_divrem(prod * prod, den)[1].is_zero()


def test_apply_A_degree_and_leading():
    # x^n Id . A has degree mN + n with invertible lower-triangular leading
    for p in (params(2, 1), params(2, 2), params(3, 1)):
        A = build_Am(p)
        for n in range(11):
            Q = apply_right(A, MatPoly.from_scalar(p.N, P_ONE.shift(n))).as_matpoly()
            assert Q.degree == p.m * p.N + n
            lead = Q.coeff(Q.degree)
            for i in range(p.N):
                assert lead[i][i] != 0
                for j in range(i + 1, p.N):
                    assert lead[i][j] == 0


def test_gauge_invariance_unimodular():
    # conjugating the seed by a constant diagonal M with det M = 1 leaves
    # the first-order operator literally unchanged
    p = params(2, 1)
    sd = build_seed(p)
    M = MatPoly.from_const([[F(3), F(0)], [F(0), F(1, 3)]])
    G = M @ sd.F
    phi_g = _phi_of(G, p.nu)
    assert phi_g == sd.Phi
    assert mat_det(G) == sd.detF


def test_gauge_invariance_general_diagonal():
    # a general diagonal M scales A by det M and B by 1/det M: the cross
    # ratio of Phi against the gauge polynomial is invariant, as is B.A
    p = params(2, 1)
    sd = build_seed(p)
    M = MatPoly.from_const([[F(2), F(0)], [F(0), F(7)]])
    G = M @ sd.F
    phi_g = _phi_of(G, p.nu)
    det_g = mat_det(G)
    assert phi_g * sd.detF.shift(1) == sd.Phi * det_g.shift(1)

    A2 = RightDiffOp([-phi_g, MatPoly.from_scalar(p.N, det_g.shift(1))])
    M1, M2, _ = t0_matrices(p)
    num = (M1 * P_X + M2) * det_g \
        - MatPoly.from_scalar(p.N, det_g.shift(1).deriv()) + phi_g
    B2 = RightDiffOp([RatMatFun(num, det_g * det_g * P_X),
                      RatMatFun(MatPoly.identity(p.N), det_g)])
    assert compose(A2, B2) + lam(p) == build_T0(p)
    assert compose(B2, A2) == compose(build_Bm(p), build_Am(p))


def test_indicial_exponents_base_operator():
    # for the base operator the exponents are {0 (N times)} + {-nu-j : j=1..N}
    for p in (params(1, 0), params(2, 0), params(3, 0)):
        M1, M2, _ = t0_matrices(p)
        zero = [[F(0)] * p.N for _ in range(p.N)]
        got = indicial_exponents(M2.transpose(), zero)
        want = sorted([F(0)] * p.N + [-NU - j for j in range(1, p.N + 1)])
        assert list(got) == want


def test_indicial_exponents_oracles():
    # scalar Euler operator mu(mu-1) + 2 mu - 6: exponents 2 and -3
    got = indicial_exponents([[F(2)]], [[F(-6)]])
    assert list(got) == [F(-3), F(2)]
    # zero data: mu(mu-1) per row
    got = indicial_exponents([[F(0), F(0)], [F(0), F(0)]],
                             [[F(0), F(0)], [F(0), F(0)]])
    assert list(got) == [F(0), F(0), F(1), F(1)]
    # irrational pair from mu(mu-1) - 1 = 0 alongside the rationals {-1, 0}
    got = indicial_exponents([[F(0), F(1)], [F(0), F(2)]],
                             [[F(-1), F(0)], [F(0), F(0)]])
    assert sorted(x for x in got if isinstance(x, F)) == [F(-1), F(0)]
    others = [x for x in got if not isinstance(x, F)]
    assert len(others) == 2
    golden = (1 + mp.sqrt(5)) / 2
    for o in others:
        assert min(abs(o - golden), abs(o - (1 - golden))) < 1e-12


def test_positivity_certificate():
    for p in GRID:
        sd = build_seed(p)
        assert sd.positive_certified
        assert sturm_count_nonneg(sd.detF) == 0
    # small nu destroys coefficient positivity and lets real roots in
    q = params(1, 2, nu=F(1, 2), allow_small_nu=True)
    sd = build_seed(q)
    assert not sd.positive_certified
    assert sturm_count_nonneg(sd.detF) > 0


def test_seed_json():
    sd = build_seed(params(2, 1))
    blob = sd.to_json()
    assert set(blob) == {"m", "F", "detF", "Upsilon", "Phi", "positive_certified"}
    assert MatPoly.from_json(blob["F"]) == sd.F
    assert Poly.from_json(blob["detF"]) == sd.detF
