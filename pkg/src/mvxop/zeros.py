"""Zero patterns of the transformed family.

det(P-hat_n) factors exactly: the seed determinant to the (N-1)-st power times
a quotient, so roots are found per factor at extended precision and merged
with the forced multiplicities.  Reports classify each root (real/complex),
cluster nearby complex roots by single linkage, and flag the roots carried by
the seed determinant factor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .algebra import Poly, mat_det, poly_divrem, sturm_count_nonneg
from .exceptional import xpoly
from .laguerre import Params
from .seed import build_seed

# Parameter sets for the two reference scatter plots (mu, delta default to 1).
FIGURE_PARAMS = {
    "1a": Params(N=2, alpha=Fraction(30), nu=Fraction(31),
                 mu=(Fraction(1), Fraction(1)),
                 delta=(Fraction(1), Fraction(1)), m=30),
    "1b": Params(N=3, alpha=Fraction(14), nu=Fraction(14),
                 mu=(Fraction(1), Fraction(1), Fraction(1)),
                 delta=(Fraction(1), Fraction(1), Fraction(1)), m=13),
}


def det_xpoly(p: Params, n: int) -> Poly:
    """Exact determinant of the transformed polynomial; degree N(mN+n)."""
    d = mat_det(xpoly(p, n).Phat)
    want = p.N * (p.m * p.N + n)
    if d.degree != want:
        raise RuntimeError(f"determinant degree {d.degree}, expected {want}")
    return d


def detf_nonneg_root_count(p: Params) -> int:
    """Distinct real roots of the seed determinant on [0, inf), exactly
    (expected 0 whenever nu > max(0, m-1))."""
    return sturm_count_nonneg(build_seed(p).detF)


def find_roots(q: Poly, precision_bits: int = 256, max_iter: int = 400):
    """All roots of q as mpc values, by simultaneous (Aberth-Ehrlich)
    iteration at the requested precision.

    Deterministic start: points on a circle sized by the Fujiwara bound with
    a fixed angular offset and a mild per-index radius stagger.  Each returned
    root satisfies |q(z)| / (max|coeff| * max(1,|z|)^deg) <= 2^(-bits/2).
    """
    if q.is_zero():
        raise ValueError("zero polynomial")
    coeffs = list(q.coeffs)
    zeros_at_origin = 0
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        zeros_at_origin += 1
    d = len(coeffs) - 1
    with mp.workprec(precision_bits):
        out = [mp.mpc(0)] * zeros_at_origin
        if d == 0:
            return out
        cs = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in coeffs]
        lead = cs[-1]
        cs = [c / lead for c in cs]

        # Fujiwara: all roots within 2 * max_k |a_{d-k}|^(1/k)
        R = mp.mpf(1)
        for k in range(1, d + 1):
            a = abs(cs[d - k]) / (2 if k == d else 1)
            if a > 0:
                R = max(R, 2 * a ** (mp.mpf(1) / k))

        def both(z):
            pv = mp.mpc(0)
            dv = mp.mpc(0)
            for c in reversed(cs):
                dv = dv * z + pv
                pv = pv * z + c
            return pv, dv

        zs = [0.55 * R * (1 + mp.mpf(j) / (7 * d))
              * mp.expjpi(2 * mp.mpf(j) / d + mp.mpf(2) / (5 * d))
              for j in range(d)]
        # relative step s gives scaled residual <= d*s, so this margin is
        # enough for the 2^(-bits/2) residual gate and stays above the
        # evaluation-noise floor of ill-conditioned inputs
        tiny = mp.mpf(2) ** (-(precision_bits // 2) - 16) / d
        for _ in range(max_iter):
            worst = mp.mpf(0)
            for j in range(d):
                pv, dv = both(zs[j])
                if pv == 0:
                    continue
                if dv == 0:
                    zs[j] *= 1 + mp.mpf(2) ** (-precision_bits // 4)
                    worst = max(worst, abs(zs[j]))
                    continue
                ratio = pv / dv
                s = mp.mpc(0)
                for k in range(d):
                    if k != j:
                        dz = zs[j] - zs[k]
                        if dz == 0:
                            dz = mp.mpf(2) ** (-precision_bits // 3)
                        s += 1 / dz
                w = ratio / (1 - ratio * s)
                zs[j] -= w
                worst = max(worst, abs(w) / max(1, abs(zs[j])))
            if worst <= tiny:
                break
        else:
            raise RuntimeError(f"root finder did not converge in {max_iter} "
                               "iterations")

        norm = max(abs(c) for c in cs)
        bound = mp.mpf(2) ** (-precision_bits // 2)
        for z in zs:
            res = abs(both(z)[0]) / (norm * max(1, abs(z)) ** d)
            if res > bound:
                raise RuntimeError(f"root residual {mp.nstr(res, 5)} exceeds "
                                   f"2^-{precision_bits // 2}")
        return out + zs


@dataclass(frozen=True)
class RootRecord:
    re: float
    im: float
    multiplicity: int
    cls: str  # "real" | "complex"
    cluster_id: int | None
    coincides_upsilon: bool


@dataclass(frozen=True)
class ZeroReport:
    n: int
    degree: int
    divisible: bool  # det factors by detF^(N-1) exactly
    roots: tuple
    n_real: int
    n_complex_distinct: int
    n_clusters: int
    cluster_sizes: tuple  # multiplicity-weighted, by cluster_id

    def to_json(self) -> dict:
        return {
            "n": self.n, "degree": self.degree,
            "divisibility": "PASS" if self.divisible else "FAIL",
            "counts": {"n_real": self.n_real,
                       "n_complex_distinct": self.n_complex_distinct,
                       "n_clusters": self.n_clusters,
                       "cluster_sizes": list(self.cluster_sizes)},
            "roots": [{"re": r.re, "im": r.im, "multiplicity": r.multiplicity,
                       "class": r.cls, "cluster_id": r.cluster_id,
                       "coincides_upsilon": r.coincides_upsilon}
                      for r in self.roots],
        }

    def to_csv(self) -> str:
        lines = ["re,im,multiplicity,class,cluster_id,coincides_upsilon"]
        for r in self.roots:
            cid = "" if r.cluster_id is None else str(r.cluster_id)
            lines.append(f"{r.re!r},{r.im!r},{r.multiplicity},{r.cls},{cid},"
                         f"{str(r.coincides_upsilon).lower()}")
        return "\n".join(lines) + "\n"


def _is_real(z) -> bool:
    return abs(mp.im(z)) <= 1e-10 * max(1, abs(z))


def _rel_dist(a, b):
    """Distance relative to the working scale |z|: zero spacing in these
    families grows with distance from the origin, so a fixed Euclidean
    radius cannot separate tight near-axis clusters from loose far ones."""
    return abs(a - b) / (1 + (abs(a) + abs(b)) / 2)


def _single_linkage(points, radius):
    """Union-find single linkage in the relative metric; returns cluster
    index per point."""
    k = len(points)
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(k):
        for j in range(i + 1, k):
            if _rel_dist(points[i], points[j]) > radius:
                continue
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return [find(i) for i in range(k)]


def classify(p: Params, n: int, precision_bits: int = 256,
             cluster_radius_factor: float = 0.05) -> ZeroReport:
    """Root-find det(P-hat_n) factor by factor and classify the roots.

    Real means |Im z| <= 1e-10 max(1,|z|).  Complex roots are clustered by
    single linkage at radius = cluster_radius_factor * (max pairwise
    distance), both measured in the |z|-relative metric; cluster sizes are
    multiplicity-weighted.  Roots contributed by
    the seed-determinant factor carry multiplicity N-1 and the coincidence
    flag; if the exact division leaves a remainder the determinant is
    root-found whole and the flag stays false everywhere.
    """
    D = det_xpoly(p, n)
    sd = build_seed(p)
    fpow = Poly([1])
    for _ in range(p.N - 1):
        fpow = fpow * sd.detF
    quo, rem = poly_divrem(D, fpow)
    divisible = rem.is_zero()

    with mp.workprec(precision_bits):
        pairs = []  # (mpc root, multiplicity, coincides)
        if divisible and p.N > 1:
            for z in find_roots(quo, precision_bits):
                pairs.append((z, 1, False))
            for z in find_roots(sd.detF, precision_bits):
                pairs.append((z, p.N - 1, True))
        else:
            for z in find_roots(D if not divisible else quo, precision_bits):
                pairs.append((z, 1, False))

        reals = [q for q in pairs if _is_real(q[0])]
        comps = [q for q in pairs if not _is_real(q[0])]

        cl = [None] * len(comps)
        n_clusters = 0
        sizes = ()
        if comps:
            pts = [q[0] for q in comps]
            spread = max((_rel_dist(a, b) for i, a in enumerate(pts)
                          for b in pts[i + 1:]), default=mp.mpf(0))
            raw = _single_linkage(pts, cluster_radius_factor * spread)
            # stable ids: order clusters by their leftmost-lowest member
            keyed = {}
            for idx, r in enumerate(raw):
                key = (float(mp.re(pts[idx])), float(mp.im(pts[idx])))
                keyed.setdefault(r, key)
                keyed[r] = min(keyed[r], key)
            order = sorted(keyed, key=lambda r: keyed[r])
            remap = {r: i for i, r in enumerate(order)}
            cl = [remap[r] for r in raw]
            n_clusters = len(order)
            tot = [0] * n_clusters
            for idx, q in enumerate(comps):
                tot[cl[idx]] += q[1]
            sizes = tuple(tot)

        recs = [RootRecord(float(mp.re(z)), 0.0, mult, "real", None, co)
                for z, mult, co in reals]
        recs += [RootRecord(float(mp.re(z)), float(mp.im(z)), q[1],
                            "complex", cl[idx], q[2])
                 for idx, q in enumerate(comps) for z in (q[0],)]
        recs.sort(key=lambda r: (r.re, r.im))

    return ZeroReport(
        n=n, degree=D.degree, divisible=divisible, roots=tuple(recs),
        n_real=len(reals), n_complex_distinct=len(comps),
        n_clusters=n_clusters, cluster_sizes=sizes)


def verify_report(rep: ZeroReport, p: Params) -> bool:
    """Report invariants: multiplicities sum to the degree; the root multiset
    is closed under conjugation (to float tolerance)."""
    if sum(r.multiplicity for r in rep.roots) != rep.degree:
        return False
    if rep.degree != p.N * (p.m * p.N + rep.n):
        return False
    scale = max((max(abs(r.re), abs(r.im)) for r in rep.roots), default=1.0)
    tol = 1e-9 * max(1.0, scale)
    for r in rep.roots:
        if not any(abs(s.re - r.re) <= tol and abs(s.im + r.im) <= tol
                   and s.multiplicity == r.multiplicity for s in rep.roots):
            return False
    return True


def report_json(rep: ZeroReport) -> str:
    return json.dumps(rep.to_json(), indent=1, sort_keys=True) + "\n"
