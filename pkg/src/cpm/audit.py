"""Necessary-condition checks for a surface-group representation.

Everything here is a finite test: relator residual, parabolicity of the
cusp images, a trace lower bound over short words and the absence of a
common invariant line or plane. Passing means the representation is
consistent with the holonomy of a finite-volume convex projective
structure; it never certifies membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import words as W
from .config import DEFAULT, Tolerances
from .errors import RangeError, SpecError
from .projective import common_eigenvector, mat3
from .surface import HolonomyRep, generator_names, relator_residual

MAX_WORD_LEN = 6
AUDIT_WORD_LEN = 4
RELATOR_TOL = 1e-8


def _fro(m) -> float:
    return float(np.linalg.norm(m))


def nilpotency_residuals(m) -> tuple:
    """(||(m - I)^3||_F, ||(m - I)^2||_F, ||m||_F)."""
    m = mat3(m)
    n = m - np.eye(3)
    n2 = n @ n
    return _fro(n2 @ n), _fro(n2), _fro(m)


def parabolic_variety_member(m, tol: Optional[float] = None) -> bool:
    """True iff (m - I)^3 vanishes and (m - I)^2 does not, relative to ||m||.

    The cube is compared with tol (1 + ||m||^3) and the square with
    sqrt(tol) (1 + ||m||^2); ``tol`` defaults to the nilpotent tolerance.
    """
    tol = DEFAULT.nilpotent if tol is None else float(tol)
    r3, r2, nm = nilpotency_residuals(m)
    return r3 <= tol * (1 + nm**3) and r2 > math.sqrt(tol) * (1 + nm**2)


def _named(generators) -> dict:
    if isinstance(generators, dict):
        return {str(k): mat3(v) for k, v in generators.items()}
    return {f"g{i + 1}": mat3(m) for i, m in enumerate(generators)}


def trace_audit(generators, max_len: int = AUDIT_WORD_LEN) -> tuple:
    """Smallest trace over reduced words of length <= max_len.

    Returns (min_trace, witness) with the witness spelled as a word string;
    ties go to the first word in shortlex order. The empty word counts, so
    the result never exceeds 3.
    """
    if not 0 <= max_len <= MAX_WORD_LEN:
        raise RangeError(f"max_len must be in [0, {MAX_WORD_LEN}]")
    mats = _named(generators)
    best, witness = 3.0, "1"
    for w, t in W.trace_table(mats, max_len).items():
        if t < best:
            best, witness = t, W.to_str(w)
    return best, witness


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    kind: Optional[str] = None  # "line" (common eigenvector) or "plane"
    witness: Optional[np.ndarray] = field(default=None, repr=False)

    def __bool__(self):
        return self.irreducible

    def to_dict(self) -> dict:
        out = {"irreducible": self.irreducible}
        if not self.irreducible:
            out["kind"] = self.kind
            out["witness"] = [float(x) for x in self.witness]
        return out


def _signed_unit(v) -> np.ndarray:
    v = np.asarray(v, float) / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v if v[k] > 0 else -v


def irreducibility_check(generators, tol: Tolerances = DEFAULT) -> Irreducibility:
    """No invariant line and no invariant plane in R^3.

    A line is a common eigenvector of the generators. A plane is the kernel
    of a common eigenvector of the transposes; its witness is that normal
    covector.
    """
    mats = list(_named(generators).values())
    if not mats:
        raise SpecError("at least one generator is required")
    v = common_eigenvector(mats, tol)
    if v is not None:
        return Irreducibility(False, "line", _signed_unit(v))
    v = common_eigenvector([m.T for m in mats], tol)
    if v is not None:
        return Irreducibility(False, "plane", _signed_unit(v))
    return Irreducibility(True)


@dataclass
class AuditReport:
    signature: tuple
    relator_residual: float
    cusp_checks: dict
    min_trace: float
    min_trace_witness: str
    irreducibility: Irreducibility
    determinants: dict
    verdict: dict
    thresholds: dict

    @property
    def passed(self) -> bool:
        return all(self.verdict.values())

    @property
    def irreducible(self) -> bool:
        return self.irreducibility.irreducible

    @property
    def summary(self) -> str:
        g, p = self.signature
        if self.passed:
            return f"consistent with a finite-volume convex projective holonomy of signature ({g}, {p})"
        failed = ", ".join(k for k, ok in self.verdict.items() if not ok)
        return f"not consistent: failed {failed}"

    def to_dict(self) -> dict:
        return {
            "signature": list(self.signature),
            "relator_residual": self.relator_residual,
            "cusp_checks": self.cusp_checks,
            "min_trace": {"value": self.min_trace, "witness": self.min_trace_witness},
            "irreducibility": self.irreducibility.to_dict(),
            "determinants": self.determinants,
            "verdict": {**self.verdict, "pass": self.passed},
            "thresholds": self.thresholds,
            "summary": self.summary,
        }


def hom_p_audit(rep, signature, tol: Tolerances = DEFAULT, relator_tol: float = RELATOR_TOL,
                max_len: int = AUDIT_WORD_LEN) -> AuditReport:
    """Run every check on a rep for signature (g, p).

    ``rep`` is a HolonomyRep or a name -> matrix dict. Names must be
    exactly a1, b1, ..., c1, ... for the signature; anything else is a
    SpecError. A generator with determinant off 1 fails the
    ``unimodular`` check (the other checks still run on the raw matrices).
    """
    g, p = (int(x) for x in signature)
    gens = rep.generators if isinstance(rep, HolonomyRep) else rep
    gens = {str(k): mat3(v) for k, v in gens.items()}
    expected = generator_names(g, p)
    if sorted(gens) != sorted(expected):
        raise SpecError(f"generators {sorted(gens)} do not match signature ({g}, {p}): expected {expected}")
    gens = {k: gens[k] for k in expected}

    dets = {k: float(np.linalg.det(m)) for k, m in gens.items()}
    unimodular = all(abs(d - 1.0) <= tol.det for d in dets.values())
    res = relator_residual(gens, g, p)
    cusps = {}
    for k in range(1, p + 1):
        name = f"c{k}"
        r3, r2, nm = nilpotency_residuals(gens[name])
        cusps[name] = {
            "nilpotency_rank_3": r3 <= tol.nilpotent * (1 + nm**3),
            "nilpotency_rank_2": r2 > math.sqrt(tol.nilpotent) * (1 + nm**2),
            "cube_residual": r3,
            "square_norm": r2,
        }
    tmin, witness = trace_audit(gens, max_len)
    irr = irreducibility_check(gens, tol)
    verdict = {
        "unimodular": unimodular,
        "relator": res <= relator_tol,
        "cusps_parabolic": all(c["nilpotency_rank_3"] and c["nilpotency_rank_2"] for c in cusps.values()),
        "trace_bound": tmin >= 3.0 - tol.trace,
        "irreducible": irr.irreducible,
    }
    thresholds = {
        "det": tol.det, "relator": relator_tol, "nilpotent": tol.nilpotent,
        "trace": tol.trace, "rank": tol.rank, "max_len": max_len,
    }
    return AuditReport((g, p), res, cusps, tmin, witness, irr, dets, verdict, thresholds)
