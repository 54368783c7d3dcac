"""Command-line driver: reproducible experiments with JSON reports.

Every report embeds the full configuration and the library version; with a
fixed configuration the output bytes are identical across reruns.  Exit
codes: 0 success, 1 mathematical failure (a domain error from the library),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .bttree import CochainPatch, INFINITY, check_harmonic, vdp_residue
from .cocycles import ChainSquare, d1_value, dv_value, theorem_b_chain_check
from .errors import RmlabError
from .evaluate import antisym_experiment
from .exact import QuadIrr, is_prime
from .hecke import coset_reps_Tn
from .hyperbolic import GSegment, HPoint, ez_cross, winding_oracle
from .mat2 import mat
from .modsym import (
    build_space,
    dimension_formula,
    generating_series_check,
    m2_basis_qexp,
)
from .rmpoints import QForm, automorph
from .runtime import worker_count


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _parse_form(text: str) -> QForm:
    return QForm.parse(text)


def _parse_mat(text: str):
    parts = [Fraction(t) for t in text.split(",")]
    if len(parts) != 4:
        raise ValueError("expected 'a,b,c,d'")
    return mat(*parts)


def _parse_point(text: str) -> HPoint:
    parts = [Fraction(t) for t in text.split(",")]
    if len(parts) != 2:
        raise ValueError("expected 'x,y'")
    return HPoint(*parts)


def _parse_segment(text: str) -> GSegment:
    parts = [Fraction(t) for t in text.split(",")]
    if len(parts) != 4:
        raise ValueError("expected 'x0,y0,x1,y1'")
    return GSegment(HPoint(parts[0], parts[1]), HPoint(parts[2], parts[3]))


def quadirr_text(q: QuadIrr) -> str:
    return f"{q.a} + {q.b}*sqrt({q.D})"


def _check_prime(p: int) -> int:
    if not is_prime(p):
        raise UsageError(f"p not prime: {p}")
    return p


class UsageError(Exception):
    pass


def cmd_automorph(args) -> dict:
    f = _parse_form(args.form)
    a = automorph(f, _check_prime(args.p))
    return {
        "form": f.to_json(),
        "gamma": [[str(e) for e in row] for row in a.gamma],
        "eps": quadirr_text(a.eps),
    }


def cmd_dv(args) -> dict:
    f = _parse_form(args.form)
    div = dv_value(f, _parse_mat(args.gamma), _parse_point(args.x0),
                   _check_prime(args.p), args.levels)
    return {"divisor": div.to_json()}


def cmd_d1(args) -> dict:
    chain = ChainSquare(_parse_segment(args.seg1), _parse_segment(args.seg2))
    div = d1_value(chain, _check_prime(args.p), args.radius)
    return {"divisor": div.to_json()}


def cmd_intersect(args) -> dict:
    s1 = _parse_segment(args.seg1)
    s2 = _parse_segment(args.seg2)
    g = _parse_mat(args.g)
    value = ez_cross(s1, s2, g)
    out = {"ez_cross": value}
    if args.oracle:
        out["winding_oracle"] = winding_oracle(s1, s2, g)
    return out


def cmd_hecke_cosets(args) -> dict:
    reps = coset_reps_Tn(args.n, _check_prime(args.p))
    return {"cosets": reps.to_json()}


def cmd_theorem_b(args) -> dict:
    f = _parse_form(args.form)
    rep = theorem_b_chain_check(_parse_segment(args.delta), args.n0, args.n1,
                                f, _check_prime(args.p), args.levels)
    return {"theorem_b": rep}


def cmd_antisym(args) -> dict:
    rep = antisym_experiment(_parse_form(args.f1), _parse_form(args.f2),
                             _check_prime(args.p), args.prec,
                             levels=args.levels, radius=args.radius)
    return {"antisym": rep}


def cmd_residues(args) -> dict:
    p = _check_prime(args.p)
    a = INFINITY if args.a == "inf" else Fraction(args.a)
    b = INFINITY if args.b == "inf" else Fraction(args.b)

    def fn(e):
        return vdp_residue([(a, 1), (b, -1)], e, p)

    patch = CochainPatch.from_function(p, args.radius, fn)
    edges = sorted(
        ((f"{e.source.k},{e.source.u}", f"{e.target.k},{e.target.u}", v)
         for e, v in patch.values.items()),
    )
    return {
        "harmonic": check_harmonic(patch),
        "edges": [list(e) for e in edges],
        "dot": patch.to_dot(),
    }


def cmd_modform(args) -> dict:
    n = args.level
    basis = build_space(n)
    g, c, dim_m2 = dimension_formula(n)
    qs = m2_basis_qexp(n, basis, args.nterms)
    series = []
    for i in range(basis.dim):
        u = [Fraction(int(j == i)) for j in range(basis.dim)]
        res = generating_series_check(u, n, basis, args.nterms)
        series.append([str(x) for x in res["constant_term"]])
    return {
        "level": n,
        "genus": g,
        "cusps": c,
        "dim_m2": dim_m2,
        "basis_qexpansions": [[str(a) for a in q] for q in qs],
        "constant_terms_per_basis_vector": series,
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rmlab", description=__doc__)
    ap.add_argument("--json", help="write the report to this path")
    ap.add_argument("--seed", type=int, default=0,
                    help="recorded in the report for reproducibility")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("automorph")
    s.add_argument("--form", required=True)
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(fn=cmd_automorph)

    s = sub.add_parser("dv")
    s.add_argument("--form", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--x0", default="1/5,1/5")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--levels", type=int, default=1)
    s.set_defaults(fn=cmd_dv)

    s = sub.add_parser("d1")
    s.add_argument("--seg1", required=True)
    s.add_argument("--seg2", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--radius", type=int, default=1)
    s.set_defaults(fn=cmd_d1)

    s = sub.add_parser("intersect")
    s.add_argument("--seg1", required=True)
    s.add_argument("--seg2", required=True)
    s.add_argument("--g", default="1,0,0,1")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(fn=cmd_intersect)

    s = sub.add_parser("hecke-cosets")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(fn=cmd_hecke_cosets)

    s = sub.add_parser("theorem-b")
    s.add_argument("--form", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n0", type=int, required=True)
    s.add_argument("--n1", type=int, required=True)
    s.add_argument("--delta", default="1/2,1/3,1/2,3")
    s.add_argument("--levels", type=int, default=1)
    s.set_defaults(fn=cmd_theorem_b)

    s = sub.add_parser("antisym")
    s.add_argument("--f1", required=True)
    s.add_argument("--f2", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--prec", type=int, default=12)
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--radius", type=int, default=5)
    s.set_defaults(fn=cmd_antisym)

    s = sub.add_parser("residues")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--radius", type=int, default=3)
    s.set_defaults(fn=cmd_residues)

    s = sub.add_parser("modform")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--nterms", type=int, default=30)
    s.set_defaults(fn=cmd_modform)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("fn",) and v is not None}
    try:
        threads = worker_count()
        body = args.fn(args)
        report = {
            "version": __version__,
            "threads": threads,
            "config": config,
            **body,
        }
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        if args.json:
            with open(args.json, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except (UsageError, ValueError) as exc:
        sys.stdout.write(json.dumps(
            {"error": {"kind": "usage", "message": str(exc)}},
            indent=2, sort_keys=True) + "\n")
        return 2
    except RmlabError as exc:
        sys.stdout.write(json.dumps(
            {"error": {"kind": type(exc).__name__, "message": str(exc)}},
            indent=2, sort_keys=True) + "\n")
        return 1


def main() -> None:  # pragma: no cover - console entry point
    raise SystemExit(run())
