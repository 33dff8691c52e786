"""JSON shapes shared by the command-line tool.

Matrices are 9-number row-major arrays, points and lines 3-number arrays.
Floats are written with Python's shortest round-trip repr, so reading a
document back gives bit-identical values.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import words as W
from .errors import SpecError
from .pants import ChartSolution, HexagonRealization, PantsChart, PantsRealization, verify_realization
from .surface import HolonomyRep, SurfaceSpec

SCHEMA = 1


def mat_out(m) -> list:
    return [float(x) for x in np.asarray(m, float).reshape(9)]


def mat_in(x) -> np.ndarray:
    """A 9-number row-major array (nested 3x3 lists are accepted too)."""
    try:
        a = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(f"not a numeric matrix: {x!r}") from None
    if a.size != 9 or a.ndim not in (1, 2):
        raise SpecError(f"a matrix needs 9 entries, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SpecError("matrix has non-finite entries")
    return a.reshape(3, 3)


def vec_out(v) -> list:
    return [float(x) for x in np.asarray(v, float).reshape(-1)]


def _clean(x):
    # numpy scalars and tuples into plain JSON values
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecError("expected a JSON object")
    return doc


# -- pants -----------------------------------------------------------------


def chart_out(chart: PantsChart) -> dict:
    return {
        "lambda": list(chart.lams), "tau": list(chart.taus), "s": chart.s, "t": chart.t,
        "regions": [d.region.value for d in chart.deltas],
    }


def chart_in(doc: dict, tol=None) -> PantsChart:
    try:
        args = (doc["lambda"], doc["tau"], float(doc["s"]), float(doc["t"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed pants chart: {exc!r}") from None
    return PantsChart.make(*args) if tol is None else PantsChart.make(*args, tol=tol)


def realization_out(real: PantsRealization) -> dict:
    h = real.hexagon
    doc = {
        "hexagon": {"a2": h.a2, "b1": h.b1, "c1": h.c1, "c2": h.c2, "a3": h.a3, "b3": h.b3,
                    "rho": list(h.rho), "sigma": list(h.sigma)},
        "triangles": {f"T{k}": [vec_out(v) for v in tri] for k, tri in enumerate(h.triangles())},
        "gammas": {f"g{i + 1}": mat_out(g) for i, g in enumerate(real.gammas)},
        "report": real.report or verify_realization(real),
    }
    if real.chart is not None:
        doc["chart"] = chart_out(real.chart)
    if real.solution is not None:
        s = real.solution
        doc["solution"] = {"kappa": list(s.kappa), "mu": list(s.mu), "nu": list(s.nu), "rho": list(s.rho),
                           "sigma1": s.sigma1, "sigma2": s.sigma2}
    return doc


def realization_in(doc: dict) -> PantsRealization:
    try:
        h = doc["hexagon"]
        hexa = HexagonRealization(*(float(h[k]) for k in ("a2", "b1", "c1", "c2", "a3", "b3")))
        gammas = tuple(mat_in(doc["gammas"][f"g{i}"]) for i in (1, 2, 3))
        chart = chart_in(doc["chart"]) if "chart" in doc else None
        sol = None
        if "solution" in doc:
            s = doc["solution"]
            sol = ChartSolution(tuple(s["kappa"]), tuple(s["mu"]), tuple(s["nu"]), tuple(s["rho"]),
                                float(s["sigma1"]), float(s["sigma2"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed realization: {exc!r}") from None
    return PantsRealization(hexa, gammas, chart, sol)


# -- surfaces --------------------------------------------------------------


def rep_out(rep: HolonomyRep, audits=None) -> dict:
    doc = {
        "spec": rep.spec.to_dict(),
        "generators": {k: mat_out(m) for k, m in rep.generators.items()},
        "words": {k: W.to_str(w) for k, w in rep.words.items()},
        "primitives": {k: mat_out(m) for k, m in rep.primitives.items()},
        "cusps": {k: list(v) for k, v in rep.cusps.items()},
        "boundaries": {k: list(v) for k, v in rep.boundaries.items()},
        "handles": {str(k): v for k, v in rep.handles.items()},
        "relator_residual": rep.relator_residual,
    }
    if audits is not None:
        doc["audits"] = audits
    return doc


def rep_in(doc: dict) -> HolonomyRep:
    try:
        spec = SurfaceSpec.from_dict(doc["spec"])
        prim = {k: mat_in(v) for k, v in doc["primitives"].items()}
        words = {k: W.parse(v) for k, v in doc["words"].items()}
        gens = {k: mat_in(v) for k, v in doc["generators"].items()}
        cusps = {k: (v[0], int(v[1])) for k, v in doc.get("cusps", {}).items()}
        bnds = {k: (v[0], int(v[1])) for k, v in doc.get("boundaries", {}).items()}
        handles = {int(k): v for k, v in doc.get("handles", {}).items()}
        res = float(doc["relator_residual"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SpecError(f"malformed representation: {exc!r}") from None
    return HolonomyRep(spec, prim, words, gens, cusps, bnds, handles, res)


def generators_in(doc: dict) -> dict:
    """Generator matrices from a rep document or a bare name -> matrix map."""
    src = doc.get("generators", doc)
    if not isinstance(src, dict):
        raise SpecError("generators must be a name -> matrix object")
    return {k: mat_in(v) for k, v in src.items() if k not in ("schema", "config")}
