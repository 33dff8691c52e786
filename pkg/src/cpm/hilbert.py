"""Hilbert distance, Finsler norm and Busemann area on convex polygons.

A body is a strictly convex polygon given in an affine chart. All
Euclidean quantities are measured in that chart; the Hilbert quantities do
not depend on the chart choice.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateError, DomainError, GeometryError
from .projective import AffineChart, ProjPoint, mat3

N_DIRECTIONS = 720
CHUNK = 4096  # samples per RNG stream; fixed so results ignore thread count
_INSIDE = 1e-12


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Strictly convex polygon, vertices counterclockwise in ``chart``."""

    vertices: np.ndarray
    chart: AffineChart = field(default_factory=AffineChart.standard)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("a body needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite vertex")
        e = np.roll(v, -1, axis=0) - v
        turns = _cross2(e, np.roll(e, -1, axis=0))
        scale = np.linalg.norm(e, axis=1) * np.linalg.norm(np.roll(e, -1, axis=0), axis=1)
        if np.all(turns < 0):
            v = v[::-1].copy()
            e = np.roll(v, -1, axis=0) - v
            turns = _cross2(e, np.roll(e, -1, axis=0))
            scale = np.linalg.norm(e, axis=1) * np.linalg.norm(np.roll(e, -1, axis=0), axis=1)
        if not np.all(turns > 1e-12 * scale):
            raise GeometryError("vertices are not strictly convex")
        # winding number one: total turning of a simple convex polygon is 2 pi
        ang = np.arctan2(turns, np.sum(e * np.roll(e, -1, axis=0), axis=1))
        if abs(ang.sum() - 2 * np.pi) > 1e-6:
            raise GeometryError("vertex sequence winds more than once")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        n /= np.linalg.norm(n, axis=1)[:, None]
        n.setflags(write=False)
        object.__setattr__(self, "_normals", n)
        c = np.sum(n * v, axis=1)
        c.setflags(write=False)
        object.__setattr__(self, "_offsets", c)

    @classmethod
    def from_points(cls, points, chart: Optional[AffineChart] = None) -> "ConvexBody":
        """Body from projective vertices (ProjPoints or 3-vectors)."""
        chart = chart or AffineChart.standard()
        return cls(chart.coords([np.asarray(getattr(p, "vec", p), float) for p in points]), chart)

    def points(self) -> list:
        return [ProjPoint(v) for v in self.chart.lift(self.vertices)]

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None] - v[None], axis=2)))

    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(np.sum(_cross2(v, np.roll(v, -1, axis=0))))

    def signed_depth(self, xy) -> np.ndarray:
        """Distance to the nearest edge line; positive inside."""
        xy = np.asarray(xy, dtype=float)
        return np.min(self._offsets - xy @ self._normals.T, axis=-1)

    def is_interior(self, xy) -> bool:
        return bool(self.signed_depth(xy) > _INSIDE * max(1.0, self.diameter))

    def transform(self, g, chart: Optional[AffineChart] = None) -> "ConvexBody":
        """Image under g. By default charted away from the image of our chart line."""
        g = mat3(g)
        lifts = self.chart.lift(self.vertices) @ g.T
        if chart is None:
            chart = AffineChart.from_line(np.linalg.solve(g.T, np.array(self.chart.line)))
        return ConvexBody(chart.coords(lifts), chart)

    # ------------------------------------------------------------------
    def _exit(self, x, d):
        """Largest t with x + t d in the closed polygon (t > 0), vectorized."""
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        nd = d @ self._normals.T
        slack = self._offsets - x @ self._normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(nd > 0, slack / nd, np.inf)
        return np.min(t, axis=-1)


def _chart_xy(body: ConvexBody, x) -> np.ndarray:
    if isinstance(x, ProjPoint):
        return body.chart.coords(x.vec)
    a = np.asarray(x, dtype=float)
    if a.shape == (3,):
        return body.chart.coords(a)
    if a.shape != (2,):
        raise DomainError(f"cannot read a point from shape {a.shape}")
    return a


def _require_interior(body, xy, name):
    if not body.is_interior(xy):
        raise DomainError(f"{name} is not strictly inside the body")


def chord_endpoints(body: ConvexBody, x, y):
    """Boundary points (p, q) of the chord through x and y, ordered p, x, y, q."""
    x, y = _chart_xy(body, x), _chart_xy(body, y)
    _require_interior(body, x, "x")
    _require_interior(body, y, "y")
    d = y - x
    if not np.any(d):
        raise DegenerateError("x and y coincide")
    p = x - body._exit(x, -d) * d
    q = y + body._exit(y, d) * d
    lift = body.chart.lift
    return ProjPoint(lift(p)), ProjPoint(lift(q))


def hilbert_distance(body: ConvexBody, x, y) -> float:
    x, y = _chart_xy(body, x), _chart_xy(body, y)
    _require_interior(body, x, "x")
    _require_interior(body, y, "y")
    d = y - x
    if not np.any(d):
        return 0.0
    # chord parametrized by d: |xy| = 1, |px| = a, |qy| = b
    a = body._exit(x, -d)
    b = body._exit(y, d)
    return float(math.log1p(1.0 / a) + math.log1p(1.0 / b))


def finsler_norm(body: ConvexBody, x, v) -> float:
    x = _chart_xy(body, x)
    _require_interior(body, x, "x")
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise DegenerateError("zero tangent vector")
    # exit parameters along +-v; 1/|x-p| |v| = 1/t
    return float(1.0 / body._exit(x, v) + 1.0 / body._exit(x, -v))


def _unit_directions(n=N_DIRECTIONS):
    th = 2 * np.pi * np.arange(n) / n
    return np.stack([np.cos(th), np.sin(th)], axis=1)


def unit_ball_radii(body: ConvexBody, x, n: int = N_DIRECTIONS) -> np.ndarray:
    """Radial function of the Finsler unit ball at x over n equal angles."""
    x = _chart_xy(body, x)
    _require_interior(body, x, "x")
    return _radii(body, x[None, :], _unit_directions(n))[0]


def _radii(body, xs, dirs):
    # exits: (npts, ndir)
    a = body._exit(xs[:, None, :], dirs[None, :, :])
    half = dirs.shape[0] // 2
    back = np.roll(a, -half, axis=1)
    return 1.0 / (1.0 / a + 1.0 / back)


def unit_ball_area(body: ConvexBody, xs) -> np.ndarray:
    """Lebesgue area of the Finsler unit ball at each point of xs."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    dirs = _unit_directions()
    dth = 2 * np.pi / len(dirs)
    out = np.empty(len(xs))
    block = max(1, 400_000 // (len(dirs) * len(body.vertices)))
    for i in range(0, len(xs), block):
        r = _radii(body, xs[i:i + block], dirs)
        out[i:i + block] = 0.5 * np.sum(r * r, axis=1) * dth
    return out


@dataclass(frozen=True)
class BusemannEstimate:
    value: float
    std_error: float
    samples: int
    seed: int


def sample_polygon(body: ConvexBody, u: np.ndarray) -> np.ndarray:
    """Map uniforms of shape (n, 3) to uniform points of the polygon."""
    v = body.vertices
    a, b, c = v[0], v[1:-1], v[2:]
    w = 0.5 * _cross2(b - a, c - a)
    cdf = np.cumsum(w) / np.sum(w)
    k = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), len(w) - 1)
    s, t = u[:, 1], u[:, 2]
    flip = s + t > 1
    s = np.where(flip, 1 - s, s)
    t = np.where(flip, 1 - t, t)
    return a + s[:, None] * (b[k] - a) + t[:, None] * (c[k] - a)


def _threads() -> int:
    try:
        cap = int(os.environ.get("CPM_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def busemann_area(body: ConvexBody, region: Optional[ConvexBody] = None,
                  n_samples: int = 10_000, seed: int = 0) -> BusemannEstimate:
    """Monte Carlo estimate of the Busemann area of ``region`` (default: body).

    The density 1/Vol(B_x(1)) is taken with Vol normalized so the Euclidean
    unit disk has measure 1; the two factors of pi cancel, leaving
    Leb(region) * mean(1 / Leb(B_x)).
    """
    if n_samples < 100:
        raise DomainError("n_samples must be at least 100")
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    if region is None:
        region = body
    elif region is not body:
        lifts = region.chart.lift(region.vertices)
        xy = body.chart.coords(lifts)
        if np.any(body.signed_depth(xy) < -_INSIDE * max(1.0, body.diameter)):
            raise DomainError("region is not inside the body")
        region = ConvexBody(xy, body.chart)
    scale = region.area()

    starts = list(range(0, n_samples, CHUNK))

    def chunk(i):
        n = min(CHUNK, n_samples - starts[i])
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(i))
        xs = sample_polygon(region, rng.random((n, 3)))
        f = 1.0 / unit_ball_area(body, xs)
        return float(np.sum(f)), float(np.sum(f * f))

    workers = min(_threads(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(chunk, range(len(starts))))
    else:
        parts = [chunk(i) for i in range(len(starts))]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return BusemannEstimate(scale * mean, scale * math.sqrt(var / n_samples), n_samples, seed)
