"""The ``cpm`` command.

Every document written to stdout carries ``"schema": 1`` and the full
effective configuration under ``"config"``. Exit codes: 0 success or
verdict pass, 1 verdict fail, 2 usage or malformed input, 3 numerical or
domain error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from . import jsonio as J
from .audit import AUDIT_WORD_LEN, MAX_WORD_LEN, RELATOR_TOL, hom_p_audit
from .catalog import SIGNATURES, standard_spec
from .classify import classify, fixed_data, invariants
from .config import DEFAULT, Tolerances
from .errors import CPMError, DomainError, SpecError
from .hilbert import ConvexBody, busemann_area
from .pants import PantsChart, build_pants
from .render import render_arrays
from .surface import SurfaceSpec, TwistParams, assemble, chart_dimension, twist_action
from .tiler import DEFAULT_DEPTH, certify_convex, expand_orbit

log = logging.getLogger("cpm")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument types ----------------------------------------------------------


def _floats(n=None):
    def parse(text):
        try:
            vals = [float(x) for x in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
        return vals
    return parse


def _signature(text):
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected g,p, got {text!r}") from None
    if len(vals) != 2 or min(vals) < 0:
        raise argparse.ArgumentTypeError(f"expected two non-negative integers g,p, got {text!r}")
    return tuple(vals)


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None


def _tolerances(items) -> Tolerances:
    names = {f.name for f in dataclasses.fields(Tolerances)}
    over = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or key not in names:
            raise UsageError(f"--tol expects NAME=VALUE with NAME in {sorted(names)}, got {item!r}")
        try:
            over[key] = float(val)
        except ValueError:
            raise UsageError(f"--tol {key}: not a number: {val!r}") from None
    return DEFAULT.with_overrides(**over)


# -- input / output ----------------------------------------------------------


def _read(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _config(args, tol: Tolerances) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "tol")}
    cfg["tolerances"] = dataclasses.asdict(tol)
    return cfg


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _document(args, tol, body: dict) -> str:
    return J.dumps({"schema": J.SCHEMA, "command": args.command, "config": _config(args, tol), **body})


# -- subcommands ---------------------------------------------------------------


def cmd_classify(args, tol):
    m = J.mat_in(args.matrix)
    cls = classify(m, tol)
    out = {"tag": cls.tag.value, "params": list(cls.params), "invariants": None, "fixed": None}
    try:
        inv = invariants(m, tol)
        out["invariants"] = {"lambda": inv.lam, "tau": inv.tau, "region": inv.region.value}
        out["region"] = inv.region.value
    except DomainError as exc:
        log.info("no (lambda, tau): %s", exc)
        out["region"] = None
    try:
        fd = fixed_data(m, cls, tol)
        out["fixed"] = {
            "points": {k: J.vec_out(p.vec) for k, p in fd.points.items()},
            "lines": {k: J.vec_out(l.vec) for k, l in fd.lines.items()},
        }
    except DomainError as exc:
        log.info("no fixed data: %s", exc)
    _emit(args, _document(args, tol, out))
    return EXIT_OK


def _chart_from_args(args, tol):
    if getattr(args, "chart", None) is not None:
        return J.chart_in(J.loads(_read(args.chart)), tol)
    missing = [f for f in ("lam", "tau", "s", "t") if getattr(args, f) is None]
    if missing:
        raise UsageError("give --chart FILE or all of --lambda, --tau, --s, --t")
    return PantsChart.make(args.lam, args.tau, args.s, args.t, tol)


def cmd_pants(args, tol):
    real = build_pants(_chart_from_args(args, tol))
    _emit(args, _document(args, tol, {"realization": J.realization_out(real)}))
    return EXIT_OK


def _rep_audits(rep, tol):
    if rep.spec.b:
        return {"relator_residual": rep.relator_residual}
    return hom_p_audit(rep, (rep.spec.g, rep.spec.p), tol).to_dict()


def cmd_assemble(args, tol):
    if args.spec is not None:
        spec = SurfaceSpec.from_dict(J.loads(_read(args.spec)))
    elif args.signature is not None:
        if args.signature not in SIGNATURES:
            raise UsageError(f"no stored decomposition for {args.signature}; choose from {list(SIGNATURES)}")
        rng = None if args.seed is None else np.random.Generator(np.random.Philox(key=args.seed))
        spec = standard_spec(*args.signature, rng=rng)
    else:
        raise UsageError("give --spec FILE or --signature g,p")
    rep = assemble(spec, tol)
    _emit(args, _document(args, tol, {"rep": J.rep_out(rep, _rep_audits(rep, tol))}))
    return EXIT_OK


def _load_rep_doc(path):
    doc = J.loads(_read(path))
    return doc.get("rep", doc)


def _curve_id(spec, text):
    for c in spec.curves:
        if str(c.id) == text:
            return c.id
    raise UsageError(f"no curve with id {text!r}; curves are {[c.id for c in spec.curves]}")


def cmd_twist(args, tol):
    rep = J.rep_in(_load_rep_doc(args.rep))
    cid = _curve_id(rep.spec, args.curve)
    rep = twist_action(rep, cid, TwistParams(args.u, args.v), tol)
    _emit(args, _document(args, tol, {"rep": J.rep_out(rep, _rep_audits(rep, tol))}))
    return EXIT_OK


def _realization_from_args(args, tol):
    if args.realization is not None:
        doc = J.loads(_read(args.realization))
        return J.realization_in(doc.get("realization", doc))
    return build_pants(_chart_from_args(args, tol))


def _tile(args, tol):
    approx = expand_orbit(_realization_from_args(args, tol), args.depth, tol)
    cert = certify_convex(approx)
    xy = approx.triangle_coords()
    body = {
        "depth": approx.depth,
        "chart_line": J.vec_out(approx.chart.line),
        "cells": [
            {"label": c.label, "kind": c.kind, "level": c.level, "lifts": [J.vec_out(v) for v in tri],
             "xy": [J.vec_out(p) for p in pxy]}
            for c, tri, pxy in zip(approx.cells, approx.lifts, xy)
        ],
        "boundary": {"lifts": [J.vec_out(p.vec) for p in approx.boundary],
                     "xy": [J.vec_out(p) for p in approx.boundary_coords()]},
        "limit_points": len(approx.limit_lifts),
        "certificate": cert.to_dict(),
    }
    return body, cert.passed


def cmd_tile(args, tol):
    body, ok = _tile(args, tol)
    _emit(args, _document(args, tol, {"tiling": body}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_render(args, tol):
    if args.tile is not None:
        doc = J.loads(_read(args.tile))
        body = doc.get("tiling", doc)
    else:
        body, _ = _tile(args, tol)
    try:
        cells = body["cells"]
        svg = render_arrays([c["xy"] for c in cells], body["boundary"]["xy"],
                            [c["level"] for c in cells], [c["label"] for c in cells], args.title)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed tiling document: {exc!r}") from None
    _emit(args, svg)
    return EXIT_OK


def cmd_volume(args, tol):
    body = ConvexBody(np.asarray(args.body, float))
    region = None if args.region is None else ConvexBody(np.asarray(args.region, float))
    if region is None:
        log.warning("no --region: the measure of the whole body is infinite, so this estimate does not converge")
    est = busemann_area(body, region, n_samples=args.samples, seed=args.seed)
    out = {"busemann_area": est.value, "std_error": est.std_error, "samples": est.samples, "seed": est.seed,
           "euclidean_area": (region or body).area()}
    _emit(args, _document(args, tol, {"volume": out}))
    return EXIT_OK


def cmd_audit(args, tol):
    doc = _load_rep_doc(args.rep)
    gens = J.generators_in(doc)
    sig = args.signature
    if sig is None:
        if "spec" not in doc:
            raise UsageError("no --signature given and the document has no spec")
        sig = (int(doc["spec"]["g"]), int(doc["spec"]["p"]))
    report = hom_p_audit(gens, sig, tol, relator_tol=args.relator_tol, max_len=args.max_len)
    _emit(args, _document(args, tol, {"audit": report.to_dict()}))
    if not report.passed:
        log.warning("audit failed: %s", report.summary)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_dimension(args, tol):
    g, p, b = args.g, args.p, args.b
    curves, pants = 3 * g - 3 + p + b, 2 * g - 2 + p + b
    out = {"g": g, "p": p, "b": b, "dimension": chart_dimension(g, p, b), "curves": curves, "pants": pants,
           "parameter_count": 4 * curves + 2 * pants + 2 * b}
    _emit(args, _document(args, tol, {"dimension": out}))
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_chart_args(p, with_realization=False):
    g = p.add_argument_group("pants chart")
    g.add_argument("--chart", help="chart JSON file with lambda, tau, s, t ('-' for stdin)")
    g.add_argument("--lambda", dest="lam", type=_floats(3), help="lambda_1,lambda_2,lambda_3")
    g.add_argument("--tau", type=_floats(3), help="tau_1,tau_2,tau_3")
    g.add_argument("--s", type=float)
    g.add_argument("--t", type=float)
    if with_realization:
        g.add_argument("--realization", help="output of the pants subcommand ('-' for stdin)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write data here instead of stdout")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")

    parser = argparse.ArgumentParser(prog="cpm", description="Convex projective surfaces: holonomy, tiling, audits.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("classify", parents=[common], help="type, invariants and fixed data of a matrix")
    p.add_argument("--matrix", type=_json_arg, required=True, help="9 numbers, row-major, as JSON")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("pants", parents=[common], help="realize one pair of pants from its chart")
    _add_chart_args(p)
    p.set_defaults(func=cmd_pants)

    p = sub.add_parser("assemble", parents=[common], help="glue a surface spec into a holonomy rep")
    p.add_argument("--spec", help="SurfaceSpec JSON file ('-' for stdin)")
    p.add_argument("--signature", type=_signature, help="use the stored decomposition for g,p")
    p.add_argument("--seed", type=int, help="with --signature: draw random parameters near the defaults")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("twist", parents=[common], help="twist-bulge deformation along one curve")
    p.add_argument("--rep", default="-", help="rep JSON from assemble or twist ('-' for stdin)")
    p.add_argument("--curve", required=True, help="curve id")
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.0)
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("tile", parents=[common], help="orbit of the fundamental triangles and certificates")
    _add_chart_args(p, with_realization=True)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.set_defaults(func=cmd_tile)

    p = sub.add_parser("render", parents=[common], help="SVG picture of a tiling")
    _add_chart_args(p, with_realization=True)
    p.add_argument("--tile", help="output of the tile subcommand ('-' for stdin)")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--title", default="orbit of fundamental triangles")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("volume", parents=[common], help="Busemann area of a convex polygon")
    p.add_argument("--body", type=_json_arg, required=True, help="vertex list [[x, y], ...] as JSON")
    p.add_argument("--region", type=_json_arg, help="sub-polygon to measure (default: the body)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("audit", parents=[common], help="necessary conditions on a representation")
    p.add_argument("--rep", default="-", help="rep JSON or name -> matrix object ('-' for stdin)")
    p.add_argument("--signature", type=_signature, help="g,p (default: from the rep's spec)")
    p.add_argument("--max-len", type=int, default=AUDIT_WORD_LEN, choices=range(MAX_WORD_LEN + 1),
                   metavar=f"0..{MAX_WORD_LEN}")
    p.add_argument("--relator-tol", type=float, default=RELATOR_TOL)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("dimension", parents=[common], help="dimension of the moduli space")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--b", type=int, default=0)
    p.set_defaults(func=cmd_dimension)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(stream=sys.stderr, format="cpm: %(levelname)s: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        tol = _tolerances(args.tol)
        return args.func(args, tol)
    except (UsageError, SpecError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (CPMError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
