"""3x3 projective linear algebra on the real projective plane.

Matrices are plain ``(3, 3)`` float arrays; points and lines are small
immutable wrappers holding a canonically normalized triple, so they can be
compared and hashed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DegenerateError, DomainError, GeometryError, SingularActionError

_EPS = np.finfo(float).eps


def mat3(m) -> np.ndarray:
    """Coerce to a finite float (3, 3) array. Accepts 9 row-major numbers."""
    a = np.asarray(m, dtype=float)
    if a.shape == (9,):
        a = a.reshape(3, 3)
    if a.shape != (3, 3):
        raise DomainError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def is_unimodular(m, tol: Tolerances = DEFAULT) -> bool:
    return abs(np.linalg.det(mat3(m)) - 1.0) <= tol.det


def unimodular_rescale(m) -> np.ndarray:
    """Scale ``m`` by det^(-1/3); rejects det <= 0."""
    m = mat3(m)
    d = np.linalg.det(m)
    if not d > 0:
        raise DomainError(f"determinant {d:.6g} is not positive")
    return m / np.cbrt(d)


def _normalize(v) -> tuple:
    v = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise DomainError("non-finite homogeneous coordinates")
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0.0:
        raise DegenerateError("all homogeneous coordinates are zero")
    out = v / v[k]
    out[k] = 1.0
    return tuple(float(c) + 0.0 for c in out)


@dataclass(frozen=True)
class ProjPoint:
    """Point of RP^2; largest-magnitude coordinate scaled to +1."""

    coords: tuple

    def __init__(self, coords):
        object.__setattr__(self, "coords", _normalize(coords))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def close_to(self, other: "ProjPoint", tol: float = DEFAULT.inc) -> bool:
        return projective_distance(self.vec, other.vec) <= tol


@dataclass(frozen=True)
class ProjLine:
    """Line of RP^2 given by a covector, normalized like ProjPoint."""

    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _normalize(coeffs))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.coeffs)

    def incidence(self, x) -> float:
        """Normalized pairing |<line, point>| / (|line| |point|)."""
        p = _as_vec(x)
        l = self.vec
        return abs(float(l @ p)) / (np.linalg.norm(l) * np.linalg.norm(p))

    def contains(self, x, tol: float = DEFAULT.inc) -> bool:
        return self.incidence(x) <= tol


def _as_vec(x) -> np.ndarray:
    if isinstance(x, (ProjPoint,)):
        return x.vec
    if isinstance(x, ProjLine):
        return x.vec
    v = np.asarray(x, dtype=float).reshape(3)
    return v


def projective_distance(u, v) -> float:
    """Sine of the angle between the lines spanned by u and v in R^3."""
    u = _as_vec(u)
    v = _as_vec(v)
    return float(np.linalg.norm(np.cross(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v)))


def act(m, x) -> ProjPoint:
    """Image of the point ``x`` under ``m``."""
    m = mat3(m)
    v = _as_vec(x)
    w = m @ v
    if np.linalg.norm(w) <= 64 * _EPS * np.linalg.norm(m) * np.linalg.norm(v):
        raise SingularActionError("image of the point is numerically zero")
    return ProjPoint(w)


def act_line(m, line) -> ProjLine:
    """Image of a line: covectors transform by the inverse transpose."""
    m = mat3(m)
    return ProjLine(np.linalg.solve(m.T, _as_vec(line)))


def line_through(a, b, tol: float = DEFAULT.inc) -> ProjLine:
    va, vb = _as_vec(a), _as_vec(b)
    if projective_distance(va, vb) <= tol:
        raise DegenerateError("line_through needs two distinct points")
    return ProjLine(np.cross(va, vb))


def meet(l1, l2, tol: float = DEFAULT.inc) -> ProjPoint:
    v1, v2 = _as_vec(l1), _as_vec(l2)
    if projective_distance(v1, v2) <= tol:
        raise DegenerateError("meet needs two distinct lines")
    return ProjPoint(np.cross(v1, v2))


def cross_ratio(p, x, y, q, tol: float = DEFAULT.inc) -> float:
    """Cross-ratio [p:x:y:q] = |p-y| |q-x| / (|p-x| |q-y|).

    Evaluated with 2x2 determinants in an orthonormal basis of the plane in
    R^3 spanned by the four lifts, which equals the affine formula in any
    chart missing the line's point at infinity. Returns ``inf`` when p = x or
    q = y.
    """
    pts = np.array([_as_vec(v) for v in (p, x, y, q)])
    pts = pts / np.linalg.norm(pts, axis=1)[:, None]
    _, sv, vt = np.linalg.svd(pts)
    if sv[2] > tol * sv[0]:
        raise GeometryError(f"points are not collinear (residual {sv[2] / sv[0]:.3g})")
    c = pts @ vt[:2].T  # coordinates on the line

    def det(i, j):
        return c[i, 0] * c[j, 1] - c[i, 1] * c[j, 0]

    num = abs(det(0, 2) * det(3, 1))
    den = abs(det(0, 1) * det(3, 2))
    if den <= _EPS * max(num, 1.0) * 16:
        if num == 0.0:
            raise DegenerateError("cross-ratio of coincident points is undefined")
        return math.inf
    return float(num / den)


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class EigenCluster:
    value: float
    algebraic: int
    geometric: int
    vectors: np.ndarray = field(repr=False)  # (3, geometric), orthonormal columns


@dataclass(frozen=True)
class Spectrum:
    """Report from :func:`eigen_real3`.

    ``eigenvalues`` lists real eigenvalues ascending with multiplicity; when
    the spectrum has a complex pair it holds the single real root and
    ``complex_pair`` is set to the root with positive imaginary part.
    """

    eigenvalues: tuple
    clusters: tuple
    complex_pair: Optional[complex] = None

    @property
    def is_real(self) -> bool:
        return self.complex_pair is None

    def cluster(self, value) -> EigenCluster:
        return min(self.clusters, key=lambda c: abs(c.value - value))


def char_poly(m):
    """(trace, sum of principal 2x2 minors, det) of m."""
    m = mat3(m)
    t = m[0, 0] + m[1, 1] + m[2, 2]
    c = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    d = float(np.linalg.det(m))
    return float(t), float(c), d


def _coeff_errors(m, safety=64.0):
    a = np.abs(m)
    et = safety * _EPS * np.trace(a)
    ec = safety * _EPS * (
        a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0]
        + a[0, 0] * a[2, 2] + a[0, 2] * a[2, 0]
        + a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1]
    )
    perm = (
        a[0, 0] * (a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1])
        + a[0, 1] * (a[1, 0] * a[2, 2] + a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] + a[1, 1] * a[2, 0])
    )
    ed = safety * _EPS * perm
    return et, ec, ed


def _newton(t, c, d, r, steps=3):
    for _ in range(steps):
        f = ((r - t) * r + c) * r - d
        fp = (3 * r - 2 * t) * r + c
        if fp == 0:
            break
        nr = r - f / fp
        if not np.isfinite(nr):
            break
        r = nr
    return r


def _cubic_roots(m, tol: Tolerances):
    """Roots of the characteristic polynomial with multiplicity calls.

    Returns (real roots ascending, complex root or None). Repeated roots are
    detected from the polynomial value at the critical points, compared
    against both the coefficient rounding error and the cluster tolerance.
    """
    t, c, d = char_poly(m)
    et, ec, ed = _coeff_errors(m)

    def p(x):
        return ((x - t) * x + c) * x - d

    def err(x):
        ax = abs(x)
        return et * ax * ax + ec * ax + ed + 8 * _EPS * (ax**3 + abs(t) * ax * ax + abs(c) * ax + abs(d))

    def double_tol(r):
        # |p(r)| below which two roots near the critical point r merge
        gap = tol.cluster * abs(r)
        return max(err(r), 0.125 * gap * gap * abs(6 * r - 2 * t))

    h = t * t - 3 * c
    eh = 2 * abs(t) * et + 3 * ec + 4 * _EPS * (t * t + 3 * abs(c))
    r0 = t / 3.0
    triple_window = (tol.cluster * abs(r0)) ** 2
    if abs(h) <= max(8 * eh, 2.25 * triple_window) and abs(p(r0)) <= max(8 * err(r0), (tol.cluster * abs(r0)) ** 3):
        return [r0, r0, r0], None

    if h > 0:
        sq = math.sqrt(h)
        if t >= 0:
            rp = (t + sq) / 3.0
            rm = (c / 3.0) / rp if rp != 0 else (t - sq) / 3.0
        else:
            rm = (t - sq) / 3.0
            rp = (c / 3.0) / rm if rm != 0 else (t + sq) / 3.0
        pm, pp = p(rm), p(rp)
        dm = abs(pm) <= double_tol(rm)
        dp = abs(pp) <= double_tol(rp)
        if dm and dp:
            if abs(pm) / double_tol(rm) <= abs(pp) / double_tol(rp):
                dp = False
            else:
                dm = False
        if dm:
            return sorted([rm, rm, t - 2 * rm]), None
        if dp:
            return sorted([t - 2 * rp, rp, rp]), None
        if pm > 0 > pp:
            # three distinct real roots, trigonometric form
            P = c - t * t / 3.0
            Q = -2.0 * t**3 / 27.0 + c * t / 3.0 - d
            rad = 2.0 * math.sqrt(-P / 3.0)
            arg = 3.0 * Q / (P * rad) if P != 0 else 0.0
            arg = min(1.0, max(-1.0, arg))
            phi = math.acos(arg) / 3.0
            roots = [r0 + rad * math.cos(phi - 2 * math.pi * k / 3) for k in range(3)]
            roots = sorted(_newton(t, c, d, r) for r in roots)
            return roots, None
    # one real root and a complex pair
    P = c - t * t / 3.0
    Q = -2.0 * t**3 / 27.0 + c * t / 3.0 - d
    D = Q * Q / 4.0 + P**3 / 27.0
    sD = math.sqrt(max(D, 0.0))
    u = np.cbrt(-Q / 2.0 + sD)
    v = np.cbrt(-Q / 2.0 - sD)
    r = _newton(t, c, d, float(u + v + r0))
    # deflate: x^2 - (t - r) x + d / r
    b = t - r
    q = d / r if r != 0 else c - r * b
    disc = b * b - 4 * q
    if disc >= 0:
        # numerically real after all: report the three real roots
        s = math.sqrt(disc)
        return sorted([r, (b - s) / 2, (b + s) / 2]), None
    return [r], complex(b / 2, math.sqrt(-disc) / 2)


def _null_space(a, rtol, scale):
    _, sv, vt = np.linalg.svd(a)
    k = int(np.sum(sv <= rtol * scale))
    k = max(k, 1)
    return vt[3 - k:].T, sv


def eigen_real3(m, tol: Tolerances = DEFAULT) -> Spectrum:
    """Real eigen-decomposition of a 3x3 matrix.

    Eigenvalues come from the closed-form cubic; eigenvectors are null
    vectors of ``m - r I`` via SVD, the count of singular values below
    ``tol.rank * ||m||`` giving the geometric multiplicity.
    """
    m = mat3(m)
    roots, cpair = _cubic_roots(m, tol)
    scale = max(np.linalg.norm(m, 2), _EPS)
    values = []
    for r in roots:
        if not values or r != values[-1][0]:
            values.append([r, 1])
        else:
            values[-1][1] += 1
    clusters = []
    for r, alg in values:
        vecs, _ = _null_space(m - r * np.eye(3), tol.rank, scale)
        geo = min(vecs.shape[1], alg)
        clusters.append(EigenCluster(float(r), alg, geo, vecs[:, -geo:] if geo < vecs.shape[1] else vecs))
    return Spectrum(tuple(float(r) for r in roots), tuple(clusters), cpair)


# ---------------------------------------------------------------------------
# affine charts


@dataclass(frozen=True)
class AffineChart:
    """Affine chart RP^2 minus ``line``; ``basis`` holds two covectors.

    Chart coordinates of v are (b1.v, b2.v) / (line.v).
    """

    line: tuple = (0.0, 0.0, 1.0)
    basis: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))

    @classmethod
    def standard(cls) -> "AffineChart":
        return cls()

    @classmethod
    def from_line(cls, line) -> "AffineChart":
        """Chart with the given line at infinity and an orthonormal completion."""
        l = np.asarray(_as_vec(line), dtype=float)
        l = l / np.linalg.norm(l)
        # deterministic completion: Householder-free Gram-Schmidt on e_i
        order = np.argsort(np.abs(l))
        b1 = np.eye(3)[order[0]] - l * l[order[0]]
        b1 /= np.linalg.norm(b1)
        b2 = np.cross(l, b1)
        return cls(tuple(float(x) for x in l), (tuple(map(float, b1)), tuple(map(float, b2))))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.basis[0], self.basis[1], self.line], dtype=float)

    def coords(self, pts, tol: float = DEFAULT.inc) -> np.ndarray:
        """Chart coordinates of one lift (shape (3,)) or many (shape (n, 3))."""
        v = np.asarray([_as_vec(p) for p in pts] if isinstance(pts, (list, tuple)) else pts, dtype=float)
        single = v.ndim == 1
        v = np.atleast_2d(v)
        w = v @ self.matrix.T
        den = w[:, 2]
        nrm = np.linalg.norm(v, axis=1) * np.linalg.norm(self.line)
        if np.any(np.abs(den) <= tol * nrm):
            raise GeometryError("point lies on the chart's line at infinity")
        out = w[:, :2] / den[:, None]
        return out[0] if single else out

    def lift(self, xy) -> np.ndarray:
        """Homogeneous lifts (with line.v = 1) of chart coordinates."""
        xy = np.asarray(xy, dtype=float)
        single = xy.ndim == 1
        xy = np.atleast_2d(xy)
        rhs = np.column_stack([xy, np.ones(len(xy))])
        v = np.linalg.solve(self.matrix, rhs.T).T
        return v[0] if single else v


def common_eigenvector(mats, tol: Tolerances = DEFAULT) -> Optional[np.ndarray]:
    """A vector that is an eigenvector of every matrix, or None.

    Eigenspaces are intersected one matrix at a time, trying eigenvalues
    of each in descending order, so for a single hyperbolic element the
    attracting point is found first. Null spaces use the ``tol.rank``
    singular-value cut relative to each matrix's norm.
    """
    mats = [mat3(m) for m in mats]

    def search(basis, k):
        if k == len(mats):
            return basis[:, 0]
        m = mats[k]
        cut = tol.rank * max(np.linalg.norm(m, 2), 1.0)
        values = sorted({c.value for c in eigen_real3(m, tol).clusters}, reverse=True)
        for mu in values:
            a = (m - mu * np.eye(3)) @ basis
            _, sv, vt = np.linalg.svd(a)
            d = basis.shape[1]
            kdim = int(np.sum(sv <= cut)) + d - len(sv)
            if kdim == 0:
                continue
            sub, _ = np.linalg.qr(basis @ vt[d - kdim:].T)
            found = search(sub, k + 1)
            if found is not None:
                return found
        return None

    if not mats:
        return None
    return search(np.eye(3), 0)
