"""Finite-depth orbit of the fundamental triangles of a pants group.

The developed domain is tiled by translates of two triangle types: the
central triangle T0 = (e1, e2, e3) and the flank T1 = (f1, e2, e3). The
other two flanks are T2 = g3 T1 and T3 = g2^-1 T1, and the cells form a
valence-3 tree alternating between the two types:

    neighbours of (0, g): (1, g), (1, g g3), (1, g g2^-1)
    neighbours of (1, g): (0, g), (0, g g2), (0, g g3^-1)

Depth d keeps every cell within tree distance d + 1 of T0, so depth 0 is
the hexagon T0..T3 and the triangle count is 3 * 2^(d+1) - 2.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from . import words as W
from .classify import Tag, classify, fixed_data
from .config import DEFAULT, Tolerances
from .errors import ChartOverflowError, DomainError, GeometryError, RangeError
from .pants import PantsRealization, hexagon_six_sides
from .projective import AffineChart, ProjLine, ProjPoint, common_eigenvector, mat3

MAX_DEPTH = 8
DEFAULT_DEPTH = 3
COORD_LIMIT = 1e12
SNAP = 1e-12
GENERATORS = ("g1", "g2", "g3")

_NEIGHBOURS = {
    0: ((1, ()), (1, (("g3", 1),)), (1, (("g2", -1),))),
    1: ((0, ()), (0, (("g2", 1),)), (0, (("g3", -1),))),
}


@dataclass(frozen=True)
class Cell:
    kind: int  # 0 central, 1 flank
    word: tuple
    level: int  # tree distance from T0

    @property
    def label(self) -> str:
        return f"{W.to_str(self.word)}.T{self.kind}"


@dataclass(frozen=True, eq=False)
class ConvexDomainApprox:
    cells: tuple
    lifts: np.ndarray = field(repr=False)  # (n, 3, 3): rows are vertex lifts of each triangle
    limit_lifts: np.ndarray = field(repr=False)  # (m, 3) boundary fixed points of conjugates
    depth: int
    chart: AffineChart
    boundary: tuple  # hull vertices (ProjPoint), counterclockwise in the chart
    realization: Optional[PantsRealization] = field(default=None, repr=False)

    @property
    def triangles(self) -> list:
        """(word label, three ProjPoints) per triangle."""
        return [(c.label, tuple(ProjPoint(v) for v in tri)) for c, tri in zip(self.cells, self.lifts)]

    def triangle_coords(self) -> np.ndarray:
        return self.chart.coords(self.lifts.reshape(-1, 3)).reshape(-1, 3, 2)

    def boundary_coords(self) -> np.ndarray:
        return self.chart.coords(np.array([p.vec for p in self.boundary]))


def cell_count(depth: int) -> int:
    return 3 * 2 ** (depth + 1) - 2


def _cells(depth: int):
    """Breadth-first cells with their words, canonical order (level, word)."""
    root = Cell(0, (), 0)
    seen = {(0, ())}
    out = [root]
    queue = deque([root])
    while queue:
        c = queue.popleft()
        if c.level > depth:
            continue
        for kind, step in _NEIGHBOURS[c.kind]:
            w = W.mul(c.word, step)
            if (kind, w) in seen:
                continue
            seen.add((kind, w))
            nc = Cell(kind, w, c.level + 1)
            out.append(nc)
            queue.append(nc)
    out.sort(key=lambda c: (c.level, W.to_str(c.word), c.kind))
    return out


def _boundary_fixed_lifts(real: PantsRealization, tol: Tolerances) -> list:
    """Lifts of each generator's boundary fixed points, signed into the domain's cone.

    The sign comes from iterating the generator (or its inverse) on an
    interior point, which converges to the fixed point from inside the cone.
    """
    inside = real.hexagon.triangles()[0].sum(axis=0)
    out = []
    for g in real.gammas:
        try:
            cls = classify(g, tol)
            data = fixed_data(g, cls, tol)
        except DomainError:
            continue  # not a boundary-type element (e.g. a corrupted realization)
        if cls.tag == Tag.HYPERBOLIC:
            pairs = ((data["p+"], g), (data["p-"], W.inv3(g)))
        elif cls.tag == Tag.QUASI_HYPERBOLIC:
            pairs = ((data["p1"], g), (data["p2"], W.inv3(g)))
        else:
            pairs = ((data["p"], g),)
        for p, it in pairs:
            x = inside.copy()
            for _ in range(60):
                x = it @ x
                x /= np.linalg.norm(x)
            v = p.vec / np.linalg.norm(p.vec)
            out.append(v if v @ x >= 0 else -v)
    return out


def _positive_chart(lifts: np.ndarray) -> Optional[AffineChart]:
    """x + y + z = 1 if every lift has positive sum, else the max-margin line."""
    unit = lifts / np.linalg.norm(lifts, axis=1)[:, None]
    if np.all(unit.sum(axis=1) > 1e-9):
        return AffineChart.from_line((1.0, 1.0, 1.0))
    # maximize m subject to l . u_i >= m, -1 <= l_j <= 1
    n = len(unit)
    c = np.array([0.0, 0.0, 0.0, -1.0])
    a_ub = np.column_stack([-unit, np.ones(n)])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), bounds=[(-1, 1)] * 3 + [(None, None)], method="highs")
    if res.status != 0 or res.x[3] <= 1e-12:
        return None
    return AffineChart.from_line(res.x[:3])


def _hull(xy: np.ndarray):
    try:
        h = ConvexHull(xy)
    except (QhullError, ValueError) as exc:
        raise GeometryError(f"degenerate hull: {exc}") from None
    return h.vertices  # counterclockwise for 2-d input


def _chart_ok(chart: AffineChart, pts: np.ndarray) -> bool:
    try:
        xy = chart.coords(pts)
    except GeometryError:
        return False
    return bool(np.all(np.isfinite(xy)) and np.max(np.abs(xy)) <= COORD_LIMIT)


def expand_orbit(real: PantsRealization, depth: int = DEFAULT_DEPTH, tol: Tolerances = DEFAULT) -> ConvexDomainApprox:
    """Triangles of all cells within the depth, plus the boundary hull.

    The hull is taken over the triangle vertices together with the
    translates g p of each generator's boundary fixed points, for the cell
    words g below the depth limit; those points lie on the boundary of the
    domain, so adding them sharpens the polyline without leaving the
    closure. At depth 0 the hull is the hexagon itself.
    """
    if not isinstance(depth, (int, np.integer)) or depth < 0:
        raise RangeError(f"depth must be a non-negative integer, got {depth!r}")
    if depth > MAX_DEPTH:
        raise RangeError(f"depth {depth} exceeds the maximum {MAX_DEPTH}")
    cells = _cells(depth)
    mats = {"g1": real.gammas[0], "g2": real.gammas[1], "g3": real.gammas[2]}
    ev = W.Evaluator(mats)
    cache = {(): np.eye(3)}

    def word_matrix(w):
        if w not in cache:
            cache[w] = word_matrix(w[:-1]) @ ev.letter(w[-1])
        return cache[w]

    base = real.hexagon.triangles()
    tris = np.array([base[c.kind] @ word_matrix(c.word).T for c in cells])
    fixed = _boundary_fixed_lifts(real, tol) if depth > 0 else []
    level_of = {}
    for c in cells:
        level_of.setdefault(c.word, c.level)
    words = sorted(level_of, key=lambda w: (len(w), W.to_str(w)))
    limit = np.array([word_matrix(w) @ p for w in words for p in fixed]).reshape(-1, 3)
    levels = np.array([c.level for c in cells])
    limit_levels = np.repeat([level_of[w] for w in words], len(fixed))

    def points(d):
        # fixed-point translates only for cells whose neighbours were all expanded
        return np.vstack([tris[levels <= d + 1].reshape(-1, 3), limit[limit_levels < d]])

    def chart_for(d):
        pts = points(d)
        chart = _positive_chart(pts)
        return chart if chart is not None and _chart_ok(chart, pts) else None

    chart = chart_for(depth)
    if chart is None:
        deepest = next((d for d in range(depth - 1, -1, -1) if chart_for(d) is not None), -1)
        raise ChartOverflowError(f"no affine chart keeps depth {depth} bounded by {COORD_LIMIT:g}", deepest)
    pts = points(depth)
    xy = chart.coords(pts)
    hv = _hull(xy)
    boundary = tuple(ProjPoint(pts[i]) for i in hv)
    return ConvexDomainApprox(tuple(cells), tris, limit[limit_levels < depth], depth, chart, boundary, real)


def boundary_polyline(approx: ConvexDomainApprox) -> list:
    """Hull vertices as ProjPoints, counterclockwise in the approximation's chart."""
    return list(approx.boundary)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class ConvexityCertificate:
    disjoint: bool
    disjoint_witness: Optional[tuple]  # (label, label, reason)
    convexity_defect: float  # most negative relative turn of the hull; >= 0 is convex
    hull_contains_all: bool
    containment_gap: float  # largest distance of a vertex outside the hull
    limit_points_on_boundary: bool
    limit_point_depth: float  # deepest fixed-point translate strictly inside the hull
    six_sides: Optional[bool]  # only at depth 0
    pairs_checked: int

    @property
    def passed(self) -> bool:
        ok = self.disjoint and self.convexity_defect >= 0 and self.hull_contains_all and self.limit_points_on_boundary
        return ok and self.six_sides is not False

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "disjoint": self.disjoint,
            "disjoint_witness": list(self.disjoint_witness) if self.disjoint_witness else None,
            "convexity_defect": self.convexity_defect,
            "hull_contains_all": self.hull_contains_all,
            "containment_gap": self.containment_gap,
            "limit_points_on_boundary": self.limit_points_on_boundary,
            "limit_point_depth": self.limit_point_depth,
            "six_sides": self.six_sides,
            "pairs_checked": self.pairs_checked,
        }


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _snap(xy, scale):
    return np.round(xy / (SNAP * scale)) * (SNAP * scale)


def _strictly_inside(p, tri, eps):
    """p (k, 2) strictly inside ccw triangles tri (k, 3, 2)."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    return (_orient(a, b, p) > eps) & (_orient(b, c, p) > eps) & (_orient(c, a, p) > eps)


def _overlap_pairs(xy, eps):
    """First overlapping pair of triangles (i, j, reason) or None, and the pair count."""
    n = len(xy)
    lo, hi = xy.min(axis=1), xy.max(axis=1)
    i, j = np.triu_indices(n, 1)
    boxes = np.all(lo[i] < hi[j], axis=1) & np.all(lo[j] < hi[i], axis=1)
    i, j = i[boxes], j[boxes]
    ti, tj = xy[i], xy[j]
    hits = []
    # a vertex or the centroid of one triangle strictly inside the other
    for k in range(3):
        bad = _strictly_inside(tj[:, k], ti, eps) | _strictly_inside(ti[:, k], tj, eps)
        hits.append((bad, "vertex inside"))
    bad = _strictly_inside(tj.mean(axis=1), ti, eps) | _strictly_inside(ti.mean(axis=1), tj, eps)
    hits.append((bad, "centroid inside"))
    # proper edge crossings
    for p in range(3):
        a, b = ti[:, p], ti[:, (p + 1) % 3]
        for q in range(3):
            c, d = tj[:, q], tj[:, (q + 1) % 3]
            o1, o2 = _orient(a, b, c), _orient(a, b, d)
            o3, o4 = _orient(c, d, a), _orient(c, d, b)
            cross = (o1 * o2 < -eps * eps) & (o3 * o4 < -eps * eps)
            cross &= (np.abs(o1) > eps) & (np.abs(o2) > eps) & (np.abs(o3) > eps) & (np.abs(o4) > eps)
            hits.append((cross, "edges cross"))
    for mask, reason in hits:
        idx = np.flatnonzero(mask)
        if len(idx):
            k = idx[0]
            return (int(i[k]), int(j[k]), reason), len(i)
    return None, len(i)


def certify_convex(approx: ConvexDomainApprox, eps: float = 1e-10) -> ConvexityCertificate:
    """Finite-depth consistency checks of the orbit with a convex developed domain.

    Disjointness uses orientation tests on coordinates snapped to a
    1e-12 grid (relative to the picture's size) with margin ``eps``.
    Failures are reported, never raised.
    """
    xy = approx.triangle_coords()
    scale = max(1.0, float(np.max(np.abs(xy))))
    xy = _snap(xy, scale)
    # orient every triangle counterclockwise
    flip = _orient(xy[:, 0], xy[:, 1], xy[:, 2]) < 0
    xy[flip] = xy[flip][:, [0, 2, 1]]
    hit, npairs = _overlap_pairs(xy, eps * scale * scale)
    witness = None
    if hit is not None:
        i, j, reason = hit
        witness = (approx.cells[i].label, approx.cells[j].label, reason)

    hull = approx.boundary_coords()
    e = np.roll(hull, -1, axis=0) - hull
    en = np.roll(e, -1, axis=0)
    turn = (e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]) / (np.linalg.norm(e, axis=1) * np.linalg.norm(en, axis=1))
    defect = float(np.min(turn))

    # signed distance of points to the hull: positive outside
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
    offsets = np.sum(normals * hull, axis=1)

    def outside(p):
        return np.max(p @ normals.T - offsets, axis=1)

    gap = float(max(0.0, np.max(outside(xy.reshape(-1, 2)))))
    lim = approx.chart.coords(approx.limit_lifts)
    depth_in = float(max(0.0, -np.min(outside(lim)))) if len(lim) else 0.0

    six = None
    if approx.depth == 0 and approx.realization is not None:
        six = hexagon_six_sides(approx.realization.hexagon)
    return ConvexityCertificate(
        disjoint=hit is None,
        disjoint_witness=witness,
        convexity_defect=defect,
        hull_contains_all=gap <= eps * scale,
        containment_gap=gap,
        limit_points_on_boundary=depth_in <= 1e-6 * scale,
        limit_point_depth=depth_in,
        six_sides=six,
        pairs_checked=npairs,
    )


def distance_to_boundary(approx: ConvexDomainApprox, p) -> float:
    """Chart distance from p to the hull polyline (zero on it)."""
    hull = approx.boundary_coords()
    q = approx.chart.coords(p.vec if isinstance(p, ProjPoint) else np.asarray(p, float))
    a, b = hull, np.roll(hull, -1, axis=0)
    ab = b - a
    t = np.clip(np.sum((q - a) * ab, axis=1) / np.sum(ab * ab, axis=1), 0.0, 1.0)
    return float(np.min(np.linalg.norm(a + t[:, None] * ab - q, axis=1)))


# ---------------------------------------------------------------------------
# proper convexity


@dataclass(frozen=True)
class ProperConvexity:
    properly_convex: bool
    witness: object = None  # common fixed ProjPoint or invariant ProjLine

    def __bool__(self) -> bool:
        return self.properly_convex


def check_properly_convex(gammas, tol: Tolerances = DEFAULT) -> ProperConvexity:
    """No point and no line fixed by all of the given elements.

    Accepts a PantsRealization or any sequence of matrices.
    """
    mats = [mat3(m) for m in (gammas.gammas if isinstance(gammas, PantsRealization) else gammas)]
    v = common_eigenvector(mats, tol)
    if v is not None:
        return ProperConvexity(False, ProjPoint(v))
    v = common_eigenvector([m.T for m in mats], tol)
    if v is not None:
        return ProperConvexity(False, ProjLine(v))
    return ProperConvexity(True)
