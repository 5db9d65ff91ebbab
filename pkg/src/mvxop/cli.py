"""Command-line interface: constructs, verification suites, zero reports,
figure emission.

Exit codes: 0 success, 1 verification failure, 2 invalid input.  Data
artifacts (weight/mvop/seed/xpoly JSON, zeros CSV, SVG) are byte-deterministic
for a fixed config; verification reports additionally carry measured
runtime_ms fields.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .algebra import MatPoly, P_ONE, P_X, RatMatFun, rat_str
from .exceptional import (
    build_xweight,
    verify_adjoint_identity,
    verify_diagonal,
    verify_eigen_T1,
    verify_lowering,
    verify_orthogonality,
    verify_pearson,
    verify_symmetry,
    xpoly,
)
from .fourier import cdh_check, verify_chi_roundtrip, verify_diagram, \
    verify_xi_roundtrip
from .laguerre import Params, build_T0, build_weight, monic_mvop, t0_matrices
from .rightops import RightDiffOp, apply_right, compose
from .seed import build_Am, build_Bm, build_seed, lam, verify_factorization, \
    verify_seed
from .zeros import FIGURE_PARAMS, classify, report_json, verify_report

SUITES = ("factorization", "symmetry", "pearson", "lowering", "eigen",
          "orthogonality", "adjoint", "diagonal")


def _parse_rat(text: str) -> Fraction:
    """Exact rational from 'p/q' or integer literal; floats are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"expected exact rational 'p/q', got {text!r}")
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def _parse_rat_list(text: str) -> tuple[Fraction, ...]:
    return tuple(_parse_rat(t) for t in text.split(","))


def _load_config(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment; flags override."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.strip()!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _threads() -> int:
    cap = os.environ.get("MVXOP_THREADS", "")
    try:
        want = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        return 1
    return max(1, want)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key=value config file; "
                    "command-line flags override it")
    sp.add_argument("--N", type=int, default=None, help="matrix size")
    sp.add_argument("--alpha", default=None, help="exact rational p/q")
    sp.add_argument("--nu", default=None, help="exact rational p/q")
    sp.add_argument("--mu", default=None,
                    help="comma-separated rationals, length N (default all 1)")
    sp.add_argument("--delta", default=None,
                    help="comma-separated rationals, length N (default all 1)")
    sp.add_argument("--m", type=int, default=None, help="seed degree")
    sp.add_argument("--n", type=int, default=None, help="polynomial index "
                    "(or highest index for suites over n)")
    sp.add_argument("--order", type=int, default=None,
                    help="minimum quadrature order (default 64)")
    sp.add_argument("--prec", type=int, default=None,
                    help="precision bits (default 160 quadrature, 256 roots)")
    sp.add_argument("--tol", type=float, default=None,
                    help="numeric tolerance (default 1e-8)")
    sp.add_argument("--out", default=None, help="output file (directory for "
                    "zeros/figure artifacts); default stdout")
    sp.add_argument("--allow-small-nu", action="store_true", default=None,
                    help="waive nu > max(0, m-1); integral claims are then "
                    "not certified")
    sp.add_argument("--suite", default=None,
                    help="verify: one of %s or 'all'" % (SUITES,))
    sp.add_argument("--check", default=None,
                    help="fourier: diagram|cdh|roundtrip|all")
    sp.add_argument("--figure", nargs="?", const="1a", default=None,
                    help="figure selector (1a|1b); for zeros: also emit SVG")
    sp.add_argument("--tamper", choices=("m2", "phi"),
                    help=argparse.SUPPRESS)


def _fill_from_config(ns: argparse.Namespace) -> None:
    if not ns.config:
        return
    cfg = _load_config(ns.config)
    casts = {"N": int, "m": int, "n": int, "order": int, "prec": int,
             "tol": float, "allow_small_nu": lambda s: s.lower() == "true"}
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(ns, attr):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(ns, attr) is None:
            setattr(ns, attr, casts.get(attr, str)(val))


def _params(ns: argparse.Namespace) -> Params:
    N = ns.N if ns.N is not None else 2
    ones = tuple(Fraction(1) for _ in range(N))
    return Params(
        N=N,
        alpha=_parse_rat(ns.alpha) if ns.alpha is not None else Fraction(7, 2),
        nu=_parse_rat(ns.nu) if ns.nu is not None else Fraction(5, 2),
        mu=_parse_rat_list(ns.mu) if ns.mu is not None else ones,
        delta=_parse_rat_list(ns.delta) if ns.delta is not None else ones,
        m=ns.m if ns.m is not None else 0,
        allow_small_nu=bool(ns.allow_small_nu),
    )


def _echo_params(p: Params) -> dict:
    return {"N": p.N, "alpha": rat_str(p.alpha), "nu": rat_str(p.nu),
            "mu": [rat_str(v) for v in p.mu],
            "delta": [rat_str(v) for v in p.delta], "m": p.m,
            "allow_small_nu": p.allow_small_nu}


def _emit(ns: argparse.Namespace, text: str) -> None:
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


# --------------------------------------------------------------- commands


def _cmd_weight(ns) -> int:
    p = _params(ns)
    W = build_weight(p)
    payload = {"command": "weight", "params": _echo_params(p),
               "weight": {"V": W.V.to_json(), "nu": rat_str(W.nu),
                          "x_power_shift": W.shift}}
    if p.m > 0:
        sd = build_seed(p)
        if sd.positive_certified:
            XW = build_xweight(p)
            payload["xweight"] = XW.to_json()
        else:
            payload["xweight"] = None
    _emit(ns, _dump(payload))
    return 0


def _cmd_mvop(ns) -> int:
    p = _params(ns)
    n = ns.n if ns.n is not None else 2
    d = monic_mvop(p, n)
    _emit(ns, _dump({"command": "mvop", "params": _echo_params(p),
                     "data": d.to_json()}))
    return 0


def _cmd_seed(ns) -> int:
    p = _params(ns)
    sd = build_seed(p)
    _emit(ns, _dump({"command": "seed", "params": _echo_params(p),
                     "data": sd.to_json(),
                     "eigenvalue": rat_str(lam(p))}))
    return 0


def _cmd_xpoly(ns) -> int:
    p = _params(ns)
    n = ns.n if ns.n is not None else 2
    d = xpoly(p, n)
    _emit(ns, _dump({"command": "xpoly", "params": _echo_params(p),
                     "data": d.to_json()}))
    return 0


def _tampered_symmetry_check(p: Params):
    """Negative control: perturb the first-order operator coefficient and
    re-test 2 (F2 W)' = W F1* + F1 W."""
    from .rightops import quasi_derivative

    W = build_weight(p)
    N = p.N
    M1, M2, _ = t0_matrices(p)
    e11 = MatPoly.from_const([[Fraction(1 if i == j == 0 else 0)
                               for j in range(N)] for i in range(N)])
    F1 = M1 * P_X + M2 + e11
    lhs = quasi_derivative(W.lmul(MatPoly.from_scalar(N, P_X)))
    lhs = lhs.lmul(MatPoly.identity(N) * Fraction(2))
    rhs = W.rmul(F1.transpose()) + W.lmul(F1)
    return lhs == rhs


def _tampered_factorization_check(p: Params):
    """Negative control: flip the sign of the x F' term in the log-derivative
    numerator and re-test the factorization."""
    from .algebra import mat_adjugate

    sd = build_seed(p)
    bad_phi = sd.Phi - (mat_adjugate(sd.F) @ sd.F.deriv()) * (P_X * 2)
    A_bad = RightDiffOp([-bad_phi, MatPoly.from_scalar(p.N, sd.Upsilon)])
    return compose(A_bad, build_Bm(p)) + lam(p) == build_T0(p)


def _verify_checks(p: Params, ns) -> list:
    """(suite, name, thunk) items; thunks return (ok, residual|None)."""
    nmax = ns.n if ns.n is not None else 3
    prec = ns.prec if ns.prec is not None else 160
    tol = ns.tol if ns.tol is not None else 1e-8
    order = ns.order if ns.order is not None else 64
    suites = SUITES if ns.suite in (None, "all") else (ns.suite,)
    checks = []

    def exact(fn):
        return lambda: (fn(), None)

    for suite in suites:
        if suite == "factorization":
            fn = _tampered_factorization_check if ns.tamper == "phi" \
                else verify_factorization
            checks += [("factorization", "seed-determinant-closed-form",
                        exact(lambda: verify_seed(p))),
                       ("factorization", "compose-and-intertwine",
                        exact(lambda fn=fn: fn(p)))]
        elif suite == "symmetry":
            fn = _tampered_symmetry_check if ns.tamper == "m2" \
                else verify_symmetry
            checks.append(("symmetry", "weight-operator-equations",
                           exact(lambda fn=fn: fn(p))))
        elif suite == "pearson":
            checks.append(("pearson", "cleared-identity",
                           exact(lambda: verify_pearson(p))))
        elif suite == "lowering":
            for n in range(nmax + 1):
                checks.append(("lowering", f"n={n}",
                               exact(lambda n=n: verify_lowering(p, n))))
        elif suite == "eigen":
            for n in range(nmax + 1):
                checks += [("eigen", f"base-n={n}",
                            exact(lambda n=n: _base_eigen(p, n))),
                           ("eigen", f"transformed-n={n}",
                            exact(lambda n=n: verify_eigen_T1(p, n)))]
            for n in range(min(nmax, 2) + 1):
                checks += [("eigen", f"diagram-n={n}",
                            exact(lambda n=n: verify_diagram(p, n))),
                           ("eigen", f"chi-roundtrip-n={n}",
                            exact(lambda n=n: verify_chi_roundtrip(p, n)))]
            checks.append(("eigen", "xi-roundtrip",
                           exact(lambda: verify_xi_roundtrip(p))))
        elif suite == "orthogonality":
            def orth():
                ok, worst = verify_orthogonality(
                    p, K=min(nmax, 3), prec=prec, tol=tol, min_order=order)
                return ok, float(worst)
            checks.append(("orthogonality", "gram-block-diagonal", orth))
        elif suite == "adjoint":
            for n, k in ((0, 0), (1, 0), (1, 1)):
                checks.append((
                    "adjoint", f"n={n},k={k}",
                    exact(lambda n=n, k=k: verify_adjoint_identity(
                        p, n, k, prec=prec, tol=tol, min_order=order))))
        elif suite == "diagonal":
            for n in range(min(nmax, 2) + 1):
                checks.append(("diagonal", f"n={n}",
                               exact(lambda n=n: verify_diagonal(p, n))))
        else:
            raise ValueError(f"unknown suite {suite!r}")
    return checks


def _base_eigen(p: Params, n: int) -> bool:
    d = monic_mvop(p, n)
    got = apply_right(build_T0(p), d.P)
    return got == RatMatFun(MatPoly.from_const(d.Gamma) @ d.P, P_ONE)


def _run_report(command: str, p: Params, checks, ns) -> int:
    def run_one(item):
        suite, name, thunk = item
        t0 = time.perf_counter()
        try:
            ok, residual = thunk()
            status = "PASS" if ok else "FAIL"
        except RuntimeError as exc:
            status, residual = "UNRESOLVED", None
            name = f"{name} ({exc})"
        ms = int((time.perf_counter() - t0) * 1000)
        return {"suite": suite, "name": name, "status": status,
                "residual": residual, "runtime_ms": ms}

    workers = min(_threads(), max(1, len(checks)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, checks))
    else:
        results = [run_one(c) for c in checks]
    def _order(r):
        match = re.search(r"n=(\d+)", r["name"])
        return (r["suite"], int(match.group(1)) if match else -1, r["name"])

    results.sort(key=_order)
    payload = {"command": command, "params": _echo_params(p),
               "results": results}
    _emit(ns, _dump(payload))
    return 0 if all(r["status"] == "PASS" for r in results) else 1


def _cmd_verify(ns) -> int:
    p = _params(ns)
    if ns.suite is not None and ns.suite != "all" and ns.suite not in SUITES:
        raise ValueError(f"unknown suite {ns.suite!r}; choose from "
                         f"{', '.join(SUITES)} or all")
    return _run_report("verify", p, _verify_checks(p, ns), ns)


def _cmd_fourier(ns) -> int:
    p = _params(ns)
    nmax = ns.n if ns.n is not None else 4
    which = ns.check or "all"
    if which not in ("diagram", "cdh", "roundtrip", "all"):
        raise ValueError(f"unknown fourier check {which!r}")
    checks = []
    if which in ("diagram", "all"):
        for n in range(nmax + 1):
            checks.append(("diagram", f"n={n}",
                           lambda n=n: (verify_diagram(p, n), None)))
    if which in ("roundtrip", "all"):
        checks.append(("roundtrip", "xi",
                       lambda: (verify_xi_roundtrip(p), None)))
        for n in range(min(nmax, 3) + 1):
            checks.append(("roundtrip", f"chi-n={n}",
                           lambda n=n: (verify_chi_roundtrip(p, n), None)))
    if which in ("cdh", "all"):
        if p.alpha <= p.m:
            raise ValueError("cdh correspondence needs alpha > m")
        checks.append(("cdh", f"K={max(nmax, 6)}",
                       lambda: (cdh_check(p.alpha, p.m, max(nmax, 6)), None)))
    return _run_report("fourier", p, checks, ns)


# ------------------------------------------------------------ zero reports


def _svg(rep, title: str) -> str:
    """Deterministic scatter: real axis highlighted, seed-coincident roots
    drawn as open markers."""
    W, H, pad = 840, 560, 46
    res = [r.re for r in rep.roots]
    ims = [r.im for r in rep.roots]
    lo_x, hi_x = min(res), max(res)
    lo_y, hi_y = min(ims + [0.0]), max(ims + [0.0])
    span_x = (hi_x - lo_x) or 1.0
    span_y = (hi_y - lo_y) or 1.0
    s = min((W - 2 * pad) / span_x, (H - 2 * pad) / span_y)

    def X(v):
        return round(pad + (v - lo_x) * s, 2)

    def Y(v):
        return round(H - pad - (v - lo_y) * s, 2)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{pad - 24}" y1="{Y(0.0)}" x2="{W - pad + 24}" '
        f'y2="{Y(0.0)}" stroke="#888" stroke-width="1.5"/>',
        f'<text x="{pad}" y="24" font-family="monospace" font-size="14" '
        f'fill="#333">{title}</text>',
    ]
    for r in sorted(rep.roots, key=lambda r: (r.re, r.im)):
        cx, cy = X(r.re), Y(r.im)
        if r.coincides_upsilon:
            style = 'fill="none" stroke="#c0392b" stroke-width="1.6"'
        elif r.cls == "real":
            style = 'fill="#1a6091"'
        else:
            style = 'fill="#2980b9"'
        rad = 3.2 if r.multiplicity > 1 else 2.6
        parts.append(f'<circle cx="{cx}" cy="{cy}" r="{rad}" {style}/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _zeros_outputs(p: Params, n: int, ns, tag: str) -> int:
    prec = ns.prec if ns.prec is not None else 256
    t0 = time.perf_counter()
    rep = classify(p, n, precision_bits=prec)
    ms = int((time.perf_counter() - t0) * 1000)
    ok = verify_report(rep, p)
    payload = {
        "command": tag, "params": _echo_params(p),
        "results": [{"name": f"zero-report-n={n}",
                     "status": "PASS" if ok else "FAIL",
                     "residual": None, "runtime_ms": ms}],
        "report": rep.to_json(),
    }
    if ns.out:
        os.makedirs(ns.out, exist_ok=True)
        base = os.path.join(ns.out, f"{tag}-N{p.N}-m{p.m}-n{n}")
        with open(base + ".csv", "w", encoding="utf-8") as fh:
            fh.write(rep.to_csv())
        if ns.figure is not None or tag == "figure":
            title = (f"zeros of det, N={p.N} m={p.m} n={n} "
                     f"alpha={rat_str(p.alpha)} nu={rat_str(p.nu)}")
            with open(base + ".svg", "w", encoding="utf-8") as fh:
                fh.write(_svg(rep, title))
        with open(base + ".json", "w", encoding="utf-8") as fh:
            fh.write(_dump(payload))
        sys.stdout.write(_dump({"written": base, "status":
                                "PASS" if ok else "FAIL"}))
    else:
        sys.stdout.write(_dump(payload))
    return 0 if ok else 1


def _cmd_zeros(ns) -> int:
    p = _params(ns)
    if ns.n is None:
        raise ValueError("zeros needs --n")
    return _zeros_outputs(p, ns.n, ns, "zeros")


def _cmd_figure(ns) -> int:
    which = ns.figure or "1a"
    if which not in FIGURE_PARAMS:
        raise ValueError(f"unknown figure {which!r}; choose 1a or 1b")
    p = FIGURE_PARAMS[which]
    n = 7 if which == "1a" else 5
    ns.figure = which
    return _zeros_outputs(p, n, ns, "figure")


COMMANDS = {
    "weight": _cmd_weight, "mvop": _cmd_mvop, "seed": _cmd_seed,
    "xpoly": _cmd_xpoly, "verify": _cmd_verify, "fourier": _cmd_fourier,
    "zeros": _cmd_zeros, "figure": _cmd_figure,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mvxop",
        description="Matrix-valued exceptional Laguerre constructions: "
                    "exact verification suites, quadrature cross-checks, "
                    "and zero-pattern reports.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(subs.add_parser(name))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse validation error -> invalid input
        return 2 if exc.code not in (0, None) else 0
    try:
        _fill_from_config(ns)
        return COMMANDS[ns.command](ns)
    except (ValueError, ZeroDivisionError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
