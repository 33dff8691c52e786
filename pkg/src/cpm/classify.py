"""Dynamical type, (lambda, tau) invariants and fixed-point data of SL3(R) elements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DomainError, NotAutomorphismError, NotBoundaryTypeError, UnsupportedClassError
from .projective import (
    ProjLine,
    ProjPoint,
    act,
    act_line,
    char_poly,
    eigen_real3,
    line_through,
    mat3,
    projective_distance,
)


class Tag(str, Enum):
    HYPERBOLIC = "hyperbolic"
    PLANAR = "planar"
    QUASI_HYPERBOLIC = "quasi_hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


class Region(str, Enum):
    R = "R"
    QH_NON_C1 = "R_QH_nonC1"
    QH_C1 = "R_QH_C1"
    P = "R_P"


@dataclass(frozen=True)
class IsometryClass:
    """Family tag plus its spectral parameters.

    ``params`` is (l+, l0, l-) for hyperbolic, (alpha, beta) for planar and
    quasi-hyperbolic, (theta,) for elliptic and () otherwise.
    """

    tag: Tag
    params: tuple = ()


@dataclass(frozen=True)
class BoundaryInvariant:
    lam: float
    tau: float
    region: Region

    def spectrum(self) -> tuple:
        return spectrum_of(self.lam, self.tau)

    def inverse(self, tol: Tolerances = DEFAULT) -> "BoundaryInvariant":
        """Invariants of the inverse element (eigenvalues inverted)."""
        lam, tau = inverse_invariants(self.lam, self.tau)
        return BoundaryInvariant(lam, tau, _inverse_region(self.region))


@dataclass(frozen=True)
class FixedData:
    tag: Tag
    points: dict
    lines: dict

    def __getitem__(self, key):
        if key in self.points:
            return self.points[key]
        return self.lines[key]


def _inverse_region(r: Region) -> Region:
    # inverting swaps which eigenvalue is repeated: smallest <-> largest
    return {Region.QH_NON_C1: Region.QH_C1, Region.QH_C1: Region.QH_NON_C1}.get(r, r)


def spectrum_of(lam: float, tau: float) -> tuple:
    """Ascending eigenvalues (lam, m1, m2) with m1 + m2 = tau, m1 m2 = 1/lam."""
    disc = tau * tau - 4.0 / lam
    s = math.sqrt(max(disc, 0.0))
    big = (tau + s) / 2.0
    small = (1.0 / lam) / big
    return tuple(sorted((lam, small, big)))


def inverse_invariants(lam: float, tau: float) -> tuple:
    ev = spectrum_of(lam, tau)
    return 1.0 / ev[2], 1.0 / ev[0] + 1.0 / ev[1]


def region_of(lam: float, tau: float, tol: Tolerances = DEFAULT) -> Region:
    """Region of a (lambda, tau) pair from the defining (in)equalities."""
    lam, tau = float(lam), float(tau)
    if not (math.isfinite(lam) and math.isfinite(tau)):
        raise DomainError("non-finite invariants")
    if abs(lam - 1.0) <= tol.parabolic and abs(tau - 2.0) <= tol.parabolic:
        return Region.P
    if not 0.0 < lam < 1.0:
        raise NotBoundaryTypeError(f"lambda={lam!r} outside (0, 1)")
    upper = lam + lam**-2
    lower = 2.0 / math.sqrt(lam)
    slack = tol.region * (1.0 + abs(tau))
    if abs(tau - upper) <= slack:
        return Region.QH_NON_C1
    if abs(tau - lower) <= slack:
        return Region.QH_C1
    if lower < tau < upper:
        return Region.R
    raise NotBoundaryTypeError(f"(lambda, tau)=({lam!r}, {tau!r}) lies in no boundary region")


def _unimodular(m, tol: Tolerances) -> np.ndarray:
    m = mat3(m)
    d = float(np.linalg.det(m))
    if not d > 0:
        raise DomainError(f"determinant {d:.6g} is not positive")
    if abs(d - 1.0) > tol.det:
        m = m / np.cbrt(d)
    return m


def near_unipotent(m, tol: Tolerances = DEFAULT) -> bool:
    """Characteristic polynomial within tolerance of (x - 1)^3.

    Eigenvalues of a perturbed Jordan block move by the cube root of the
    perturbation (often a complex pair), so the (1, 2) cusp point is matched
    on the coefficients: trace and second invariant both within
    tol.parabolic^2 (1 + ||m||)^2 of 3. For a diagonalizable matrix this
    is the eigenvalue window |lambda - 1|, |tau - 2| of order tol.parabolic.
    """
    t, c, _ = char_poly(m)
    slack = tol.parabolic**2 * (1.0 + np.linalg.norm(m)) ** 2
    return abs(t - 3.0) <= slack and abs(c - 3.0) <= slack


def _rank_deficiency(m, value, tol: Tolerances) -> int:
    sv = np.linalg.svd(m - value * np.eye(3), compute_uv=False)
    return int(np.sum(sv <= tol.rank * max(np.linalg.norm(m, 2), 1.0)))


def classify(m, tol: Tolerances = DEFAULT) -> IsometryClass:
    """Assign one of the six families.

    Matrices with positive determinant other than 1 are rescaled first.
    Spectra that fit none of the families raise NotAutomorphismError.
    """
    m = _unimodular(m, tol)
    if near_unipotent(m, tol):
        k = _rank_deficiency(m, 1.0, tol)
        if k >= 3:
            return IsometryClass(Tag.IDENTITY)
        if k == 2:
            raise NotAutomorphismError("unipotent with a rank-one nilpotent part")
        return IsometryClass(Tag.PARABOLIC)
    spec = eigen_real3(m, tol)
    if not spec.is_real:
        z = spec.complex_pair
        r = spec.eigenvalues[0]
        if abs(abs(z) - 1.0) <= tol.elliptic and abs(r - 1.0) <= tol.elliptic:
            theta = math.atan2(z.imag, z.real) % (2 * math.pi)
            return IsometryClass(Tag.ELLIPTIC, (theta,))
        raise NotAutomorphismError(f"complex spectrum {r!r}, {z!r} fits no family")
    ev = spec.eigenvalues
    if ev[0] <= 0:
        raise NotAutomorphismError(f"non-positive eigenvalue {ev[0]!r}")

    if len(spec.clusters) == 1:
        k = spec.clusters[0].geometric
        if k >= 3:
            return IsometryClass(Tag.IDENTITY)
        if k <= 1:
            return IsometryClass(Tag.PARABOLIC)
        raise NotAutomorphismError("unipotent with a rank-one nilpotent part")
    if len(spec.clusters) == 2:
        rep = next(c for c in spec.clusters if c.algebraic == 2)
        other = next(c for c in spec.clusters if c.algebraic == 1)
        tag = Tag.PLANAR if rep.geometric == 2 else Tag.QUASI_HYPERBOLIC
        return IsometryClass(tag, (rep.value, other.value))
    return IsometryClass(Tag.HYPERBOLIC, (ev[2], ev[1], ev[0]))


def invariants(m, tol: Tolerances = DEFAULT) -> BoundaryInvariant:
    """(lambda, tau) and region from the spectrum.

    The region follows the eigenvalue multiplicity call rather than a bare
    threshold on tau, so it agrees with :func:`classify` by construction:
    repeated smallest eigenvalue gives the non-C1 quasi-hyperbolic edge,
    repeated largest the C1 edge.
    """
    m = _unimodular(m, tol)
    if near_unipotent(m, tol):
        t = float(np.trace(m))
        return BoundaryInvariant(t / 3.0, 2.0 * t / 3.0, Region.P)
    spec = eigen_real3(m, tol)
    if not spec.is_real:
        raise NotBoundaryTypeError("complex spectrum")
    ev = spec.eigenvalues
    if ev[0] <= 0:
        raise NotBoundaryTypeError(f"non-positive eigenvalue {ev[0]!r}")
    lam, tau = ev[0], ev[1] + ev[2]
    if len(spec.clusters) == 1:
        region = Region.P
    elif len(spec.clusters) == 2:
        region = Region.QH_NON_C1 if ev[0] == ev[1] else Region.QH_C1
    else:
        region = Region.R
    return BoundaryInvariant(float(lam), float(tau), region)


def _eigvec(m, value) -> np.ndarray:
    _, _, vt = np.linalg.svd(m - value * np.eye(3))
    return vt[-1]


def fixed_data(m, cls: Optional[IsometryClass] = None, tol: Tolerances = DEFAULT,
               allow_planar: bool = False) -> FixedData:
    """Eigen-derived fixed points and invariant lines.

    Hyperbolic: p+, p0, p- and the lines D+-, D+0, D-0 through pairs of them.
    Quasi-hyperbolic: p1 (eigenvalue beta), p2 (eigenvalue alpha) and the
    stable line D of the alpha block. Parabolic: p and the invariant line D
    through it. Planar (only with ``allow_planar``): p (beta) and the line
    of alpha-eigenvectors.
    """
    m = _unimodular(m, tol)
    cls = cls or classify(m, tol)
    if cls.tag == Tag.HYPERBOLIC:
        lp, l0, lm = cls.params
        pts = {"p+": ProjPoint(_eigvec(m, lp)), "p0": ProjPoint(_eigvec(m, l0)), "p-": ProjPoint(_eigvec(m, lm))}
        lines = {
            "D+-": line_through(pts["p+"], pts["p-"]),
            "D+0": line_through(pts["p+"], pts["p0"]),
            "D-0": line_through(pts["p-"], pts["p0"]),
        }
    elif cls.tag == Tag.QUASI_HYPERBOLIC:
        a, b = cls.params
        pts = {"p1": ProjPoint(_eigvec(m, b)), "p2": ProjPoint(_eigvec(m, a))}
        lines = {"D": ProjLine(_eigvec(m.T, b))}
    elif cls.tag == Tag.PARABOLIC:
        pts = {"p": ProjPoint(_eigvec(m, 1.0))}
        lines = {"D": ProjLine(_eigvec(m.T, 1.0))}
    elif cls.tag == Tag.PLANAR and allow_planar:
        a, b = cls.params
        pts = {"p": ProjPoint(_eigvec(m, b))}
        lines = {"D": ProjLine(_eigvec(m.T, b))}
    else:
        raise UnsupportedClassError(f"no fixed data for class {cls.tag.value}")

    for name, p in pts.items():
        if projective_distance(act(m, p), p) > _fix_tol(m, tol):
            raise NotAutomorphismError(f"point {name} is not fixed (residual too large)")
    for name, l in lines.items():
        if projective_distance(act_line(m, l), l) > _fix_tol(m, tol):
            raise NotAutomorphismError(f"line {name} is not preserved")
    return FixedData(cls.tag, pts, lines)


def _fix_tol(m, tol: Tolerances) -> float:
    # parabolic eigenvectors are only sqrt(eps)-accurate; scale by conditioning
    return max(tol.inc, 1e-6) * max(1.0, np.linalg.cond(m))
