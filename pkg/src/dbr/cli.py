"""Command-line front end: ``dbr {kernel,schur,tuple,defect,verify}``.

Every command writes one JSON document (stdout or ``--output``).  Exit codes:
0 success, 1 malformed input, 2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .defect import (
    annihilation_check,
    classify,
    dmu_product,
    h2_product,
    local_order_product,
    rank_growth,
    summarize,
)
from .hardy import AtomicMeasure, StableRational
from .kernel import (
    ModelError,
    build_model,
    degree_one_parameters,
    kernel_bivariate,
    verify_model,
)
from .poly import ComplexPoly, FactorizationError, fejer_riesz_residual, laurent_modulus_product
from .tuples import (
    CirclePoint,
    TupleError,
    allowability_certificate,
    dlambda_closed_form,
    multi_tuple,
    rank_one_tuple,
    tuple_product,
)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2
DEFAULT_TOL = 1e-9


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------- parsing

_NUM = re.compile(r"^[+-]?\d+$")


def parse_number(text: str):
    """Integer, real or complex literal; ``i`` and ``j`` both mark the imaginary unit."""
    s = text.strip().replace(" ", "")
    if not s:
        raise InputError("empty number")
    if _NUM.match(s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        pass
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse number {text!r}") from None


def parse_atom(text: str):
    """``a+bi``, ``r@theta`` or ``zeta:n:k``; the last form yields a :class:`CirclePoint`."""
    s = text.strip()
    if s.startswith("zeta:"):
        parts = s.split(":")
        if len(parts) != 3:
            raise InputError(f"root of unity must be zeta:n:k, got {text!r}")
        try:
            n, k = int(parts[1]), int(parts[2])
        except ValueError:
            raise InputError(f"bad root of unity {text!r}") from None
        if n < 1:
            raise InputError("root of unity order must be >= 1")
        return CirclePoint.root_of_unity(n, k)
    if "@" in s:
        r, theta = s.split("@", 1)
        try:
            return complex(float(r) * np.exp(1j * float(theta)))
        except ValueError:
            raise InputError(f"bad polar atom {text!r}") from None
    return parse_number(s)


def _split(text: str) -> list[str]:
    return [t for t in (x.strip() for x in text.split(",")) if t]


def parse_measure(atoms: str, weights: str) -> AtomicMeasure:
    a = [complex(parse_atom(t)) for t in _split(atoms)]
    try:
        w = [float(t) for t in _split(weights)]
    except ValueError:
        raise InputError(f"bad weights {weights!r}") from None
    if len(a) != len(w):
        raise InputError("atoms and weights differ in length")
    try:
        return AtomicMeasure(tuple(a), tuple(w))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def parse_coeffs(text: str) -> list:
    return [parse_number(t) for t in _split(text)]


def _circle(text: str) -> CirclePoint:
    atom = parse_atom(text)
    try:
        return CirclePoint.of(atom)
    except TupleError as exc:
        raise InputError(str(exc)) from None


def parse_multi_atom(text: str):
    """``lam|m|p1;p2`` with each ``p`` a comma list of coefficients."""
    parts = text.split("|")
    if len(parts) != 3:
        raise InputError(f"atom spec must be lam|m|p1;p2;..., got {text!r}")
    try:
        m = int(parts[1])
    except ValueError:
        raise InputError(f"bad m in {text!r}") from None
    polys = [parse_coeffs(p) for p in parts[2].split(";") if p.strip()]
    return _circle(parts[0]), m, polys


# --------------------------------------------------------------------------- JSON


def to_json(x):
    """Recursively convert to JSON-ready values; complex numbers become ``[re, im]``."""
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_json(x.tolist())
    if isinstance(x, ComplexPoly):
        return to_json(list(x.coeffs))
    if isinstance(x, StableRational):
        return {"num": to_json(x.num), "den": to_json(x.den)}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_real(x.real), _real(x.imag)]
    if isinstance(x, (float, np.floating)):
        return _real(x)
    return x


def _real(v):
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return None
    return 0.0 if v == 0 else v


def _cplx(x):
    """Force ``[re, im]`` for a scalar that may be an int."""
    c = complex(x)
    if isinstance(x, (int, np.integer)):
        return [int(x), 0]
    return [_real(c.real), _real(c.imag)]


# --------------------------------------------------------------------------- commands


def _tol(args) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("DBR_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"DBR_TOL is not a number: {env!r}") from None
    return DEFAULT_TOL


def _verification(model, args, tol):
    rep = verify_model(model, trials=args.trials, seed=args.seed, tol=tol)
    return rep, {
        "trials": rep.trials,
        "passed": rep.passed,
        "checks": {k: {"residual": rep.residuals[k], "tolerance": rep.tolerances[k]} for k in rep.residuals},
    }


def cmd_kernel(args):
    tol = _tol(args)
    mu = parse_measure(args.atoms, args.weights)
    model = build_model(mu)
    R = laurent_modulus_product(mu.atoms, mu.weights)
    bi = kernel_bivariate(model)
    rep, ver = _verification(model, args, tol)
    doc = {
        "command": "kernel",
        "measure": {"atoms": list(mu.atoms), "weights": list(mu.weights)},
        "q": model.q,
        "fejer_riesz_residual": {"residual": fejer_riesz_residual(R, model.q), "tolerance": 1e-10 * float(np.max(R.on_circle()))},
        "phi": model.phi,
        "mate": model.mate,
        "dual_basis": list(model.dual_basis),
        "gram": model.gram,
        "gram_condition": model.gram_cond,
        "atom_kernels": [{"atom": a, "num": K.num, "den": K.den} for a, K in zip(mu.atoms, model.atom_kernels)],
        "kernel_closed_form": {
            "layout": "K_w(z) = N / (q(z) conj(q(w)) (1 - z conj(w))); N[a][b] multiplies conj(w)^a z^b",
            "numerator": bi["numerator"],
            "q": bi["q"],
        },
        "verification": ver,
    }
    return doc, rep.passed


def cmd_schur(args):
    tol = _tol(args)
    mu = parse_measure(args.atoms, args.weights)
    model = build_model(mu)
    rep, ver = _verification(model, args, tol)
    doc = {
        "command": "schur",
        "measure": {"atoms": list(mu.atoms), "weights": list(mu.weights)},
        "q": model.q,
        "numerators": list(model.schur_numerators),
        "psd_matrix": model.psd,
        "rank": model.schur_rank,
        "boundary_residual": {"residual": model.diagnostics.get("schur_boundary_residual", 0.0), "tolerance": tol},
        "verification": ver,
    }
    if model.n == 1:
        beta, gamma = degree_one_parameters(model)
        doc["degree_one"] = {"beta": beta, "gamma": gamma, "one_minus_abs_beta_minus_abs_gamma": 1 - abs(beta) - abs(gamma)}
    return doc, rep.passed


def _build_tuple(args):
    try:
        if args.atom:
            return multi_tuple([parse_multi_atom(a) for a in args.atom]), "multi"
        if args.m is None or args.lam is None:
            raise InputError("tuple needs --lambda and --m, or one or more --atom")
        lam = _circle(args.lam)
        if args.closed_form:
            return dlambda_closed_form(lam, args.m), "closed_form"
        return rank_one_tuple(lam, parse_coeffs(args.p), args.m), "rank_one"
    except TupleError as exc:
        raise InputError(str(exc)) from None


def _distribution_doc(mu, kmax):
    return {
        "lebesgue_weight": mu.lebesgue_weight,
        "order": mu.order,
        "terms": [
            {"lambda": lam, "poly_in_D": [_cplx(c) for c in coeffs]}
            for lam, coeffs in mu.monomial_terms()
        ],
        "description": mu.describe(),
        "fourier": [_cplx(mu.fourier(k)) for k in range(kmax + 1)],
    }


def cmd_tuple(args):
    t, kind = _build_tuple(args)
    # Hermitian symmetry is exact by construction; report the check anyway
    herm = max(
        abs(complex(mu.fourier(-k)) - complex(mu.fourier(k)).conjugate()) for mu in t.entries for k in range(args.kmax + 1)
    )
    doc = {
        "command": "tuple",
        "kind": kind,
        "n": t.n,
        "kmax": args.kmax,
        "entries": [_distribution_doc(mu, args.kmax) for mu in t.entries],
        "hermitian_residual": {"residual": herm, "tolerance": 1e-12},
        "leading_is_positive_measure": t.entries[-1].is_positive_measure(1e-12),
    }
    passed = herm <= 1e-12
    if args.certify:
        cert = allowability_certificate(t, args.N)
        doc["allowability"] = {
            "N": cert.N,
            "min_eigenvalue_over_scale": {"residual": cert.min_eig, "tolerance": -1e-8},
            "positive": cert.positive,
            "shift_bound": cert.shift_bound,
        }
        passed = passed and cert.positive
    return doc, passed


def _defect_ip(args):
    if args.atoms is not None:
        return dmu_product(parse_measure(args.atoms, args.weights or "")), "atomic"
    if args.local is not None:
        if args.m is None:
            raise InputError("--local needs --m")
        lam = complex(_circle(args.local))
        return local_order_product(lam, ComplexPoly(parse_coeffs(args.p)), args.m), "higher-order local"
    if args.lam is not None or args.atom:
        t, _ = _build_tuple(args)
        return tuple_product(t), "tuple"
    return h2_product(), "h2"


def cmd_defect(args):
    if args.N < args.nmax:
        raise InputError("--N must be at least --nmax")
    ip, kind = _defect_ip(args)
    reports = classify(ip, args.N, args.nmax)
    doc = {
        "command": "defect",
        "inner_product": {"kind": kind, "tag": ip.tag},
        "N": args.N,
        "scope": f"polynomials of degree <= {args.N}",
        "summary": summarize(reports),
        "orders": [
            {
                "order": r.order,
                "matrix": r.matrix if args.matrices else None,
                "eigenvalues": r.eigenvalues,
                "rank": r.rank,
                "scale": r.scale,
                "flags": r.flags,
                "hermitian_residual": {"residual": r.hermitian_residual, "tolerance": 1e-12 * r.scale},
            }
            for r in reports
        ],
    }
    passed = all(r.hermitian_residual <= 1e-12 * r.scale for r in reports)
    if args.annihilate:
        p = ComplexPoly(parse_coeffs(args.annihilate))
        val = annihilation_check(ip, p, args.N)
        tol = 1e-8 * reports[0].scale
        doc["annihilation"] = {"p": p, "residual": val, "tolerance": tol, "annihilated": val <= tol}
    if args.rank_growth:
        doc["rank_growth"] = {"informational": True, "ranks": rank_growth(ip)}
    return doc, passed


def cmd_verify(args):
    if args.atoms is not None:
        tol = _tol(args)
        model = build_model(parse_measure(args.atoms, args.weights or ""))
        rep, ver = _verification(model, args, tol)
        return {"command": "verify", "target": "model", "verification": ver}, rep.passed
    from .suite import CRITERIA, run_suite

    keys = None
    if args.only:
        keys = [k.strip().upper() for k in args.only.split(",") if k.strip()]
        unknown = [k for k in keys if k not in CRITERIA]
        if unknown:
            raise InputError(f"unknown criteria: {', '.join(unknown)}")
    results = run_suite(keys)
    for r in results:
        print(r.line(), file=sys.stderr)
    doc = {
        "command": "verify",
        "suite": args.suite,
        "passed": all(r.passed for r in results),
        "criteria": [r.to_dict(timings=args.timings) for r in results],
    }
    return doc, doc["passed"]


# --------------------------------------------------------------------------- entry


def _add_common(p, measure=True):
    if measure:
        p.add_argument("--atoms", help="comma list: a+bi, r@theta or zeta:n:k")
        p.add_argument("--weights", help="comma list of positive weights")
    p.add_argument("--tol", type=float, default=None, help="verification tolerance (default: $DBR_TOL or 1e-9)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="write JSON here instead of stdout")


def _add_tuple_args(p):
    p.add_argument("--lambda", dest="lam", help="circle point")
    p.add_argument("--p", default="1", help="coefficients of p, ascending")
    p.add_argument("--m", type=int)
    p.add_argument("--closed-form", action="store_true", help="use the p = 1 closed form")
    p.add_argument("--atom", action="append", help="lam|m|p1;p2 (repeatable) for several atoms")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dbr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dbr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="reproducing kernel of an atomic weighted Dirichlet space")
    _add_common(p)
    p.set_defaults(func=cmd_kernel, needs_measure=True)

    p = sub.add_parser("schur", help="rational Schur function of an atomic measure")
    _add_common(p)
    p.set_defaults(func=cmd_schur, needs_measure=True)

    p = sub.add_parser("tuple", help="Fourier table of a shift-invariant tuple")
    _add_tuple_args(p)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--certify", action="store_true", help="add the truncated allowability certificate")
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tuple, needs_measure=False)

    p = sub.add_parser("defect", help="defect forms and classification on polynomials of degree <= N")
    p.add_argument("--atoms")
    p.add_argument("--weights")
    p.add_argument("--local", help="circle point for the order-m local Dirichlet norm (with --p, --m)")
    p.add_argument("--h2", action="store_true", help="plain Hardy norm (the default when nothing else is given)")
    _add_tuple_args(p)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--annihilate", help="coefficients of p for the annihilation check")
    p.add_argument("--matrices", action="store_true", help="include the full defect matrices")
    p.add_argument("--rank-growth", action="store_true", help="informational rank on nested truncations")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_defect, needs_measure=False)

    p = sub.add_parser("verify", help="acceptance fixtures, or spot checks of one model")
    p.add_argument("--suite", default="paper", choices=["paper"])
    p.add_argument("--only", help="comma list of criteria, e.g. AC1,AC6")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")
    _add_common(p)
    p.set_defaults(func=cmd_verify, needs_measure=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "needs_measure", False) and (args.atoms is None or args.weights is None):
            raise InputError("--atoms and --weights are required")
        doc, passed = args.func(args)
    except InputError as exc:
        print(f"dbr: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, FactorizationError) as exc:
        print(f"dbr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    doc["version"] = __version__
    doc["passed"] = bool(passed)
    text = json.dumps(to_json(doc), indent=2, sort_keys=False) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
