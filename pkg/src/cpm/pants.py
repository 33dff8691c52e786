"""Pairs of pants: coordinates (boundary invariants, s, t) to triangles and generators.

The realization places the three vertices e_i of the central triangle at the
coordinate points and the three outer vertices at
f1 = (-1, b1, c1), f2 = (a2, -1, c2), f3 = (a3, b3, -1). The generator of
boundary i fixes e_i and maps the triangle pattern around it, so that
gamma_3 gamma_2 gamma_1 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .classify import BoundaryInvariant, Region, invariants, region_of
from .config import DEFAULT, Tolerances
from .errors import ConsistencyError, InfeasibleChartError, NormalizationError, RangeError
from .projective import AffineChart, ProjPoint, projective_distance

S_RANGE = (1e-8, 1e8)


@dataclass(frozen=True)
class PantsChart:
    deltas: tuple  # three BoundaryInvariant
    s: float
    t: float

    @classmethod
    def make(cls, lams, taus, s, t, tol: Tolerances = DEFAULT) -> "PantsChart":
        """Chart from raw (lambda_i, tau_i); regions are assigned here."""
        if len(lams) != 3 or len(taus) != 3:
            raise RangeError("a pants chart needs three (lambda, tau) pairs")
        ds = tuple(BoundaryInvariant(float(l), float(t_), region_of(l, t_, tol)) for l, t_ in zip(lams, taus))
        return cls(ds, float(s), float(t))

    def __post_init__(self):
        for name, x in (("s", self.s), ("t", self.t)):
            if not (S_RANGE[0] < x < S_RANGE[1]):
                raise RangeError(f"{name}={x!r} outside {S_RANGE}")

    @property
    def lams(self):
        return tuple(d.lam for d in self.deltas)

    @property
    def taus(self):
        return tuple(d.tau for d in self.deltas)


@dataclass(frozen=True)
class ChartSolution:
    kappa: tuple
    mu: tuple
    nu: tuple
    rho: tuple
    sigma1: float
    sigma2: float

    def residuals(self, taus=None) -> dict:
        """Relative defects of the monomial identities (and of tau if given)."""
        k, m, n = self.kappa, self.mu, self.nu
        out = {
            "kappa_mu_nu": max(abs(k[i] * m[i] * n[i] - 1.0) for i in range(3)),
            "cross": max(abs(k[i] * n[(i + 1) % 3] * m[(i + 2) % 3] - 1.0) for i in range(3)),
            "sigma": abs(self.sigma1 * self.sigma2 / (self.rho[0] * self.rho[1] * self.rho[2]) - 1.0),
        }
        if taus is not None:
            out["tau"] = max(
                abs(-m[i] + n[i] * (self.rho[i] - 1.0) - taus[i]) / (1.0 + abs(taus[i])) for i in range(3)
            )
        return out


def solve_chart(chart: PantsChart) -> ChartSolution:
    """Closed-form solution of the gluing system for one pants."""
    l = chart.lams
    tau = chart.taus
    s, t = chart.s, chart.t
    mu, nu, rho = [], [], []
    for i in range(3):
        li, l1, l2 = l[i], l[(i + 1) % 3], l[(i + 2) % 3]
        mu.append(math.sqrt(l2 / (li * l1)) * s)
        nu.append(math.sqrt(l1 / (li * l2)) / s)
        rho.append(1.0 + math.sqrt(li * l2 / l1) * tau[i] * s + (l2 / l1) * s * s)
    if min(rho) <= 1.0:
        raise InfeasibleChartError(f"rho={rho} has an entry <= 1")
    return ChartSolution(tuple(l), tuple(mu), tuple(nu), tuple(rho), t * rho[1], rho[0] * rho[2] / t)


@dataclass(frozen=True)
class HexagonRealization:
    a2: float
    b1: float
    c1: float
    c2: float
    a3: float
    b3: float

    @property
    def e(self) -> np.ndarray:
        return np.eye(3)

    @property
    def f(self) -> np.ndarray:
        """Rows f1, f2, f3."""
        return np.array([
            [-1.0, self.b1, self.c1],
            [self.a2, -1.0, self.c2],
            [self.a3, self.b3, -1.0],
        ])

    @property
    def rho(self) -> tuple:
        return (self.b3 * self.c2, self.c1 * self.a3, self.a2 * self.b1)

    @property
    def sigma(self) -> tuple:
        return (self.a2 * self.b3 * self.c1, self.a3 * self.b1 * self.c2)

    def lifts(self) -> dict:
        e, f = self.e, self.f
        return {"p1": e[0], "p2": e[1], "p3": e[2], "q1": f[0], "q2": f[1], "q3": f[2]}

    def triangles(self) -> tuple:
        """T0..T3 as (3, 3) arrays of row lifts."""
        e, f = self.e, self.f
        return (
            np.array([e[0], e[1], e[2]]),
            np.array([f[0], e[1], e[2]]),
            np.array([e[0], f[1], e[2]]),
            np.array([e[0], e[1], f[2]]),
        )

    def outer_cycle(self) -> np.ndarray:
        """The six vertices in cyclic order around the hexagon."""
        e, f = self.e, self.f
        return np.array([e[0], f[2], e[1], f[0], e[2], f[1]])

    def regauge(self) -> "HexagonRealization":
        """Diagonal renormalization to a2 = a3 = 1 (invariants unchanged)."""
        d2, d3 = self.a2, self.a3
        return HexagonRealization(1.0, self.b1 * d2, self.c1 * d3, self.c2 * d3 / d2, 1.0, self.b3 * d2 / d3)


def hexagon_from_invariants(rho, sigma1) -> HexagonRealization:
    """Gauge a2 = a3 = 1 solution of the monomial system, without checks."""
    r1, r2, r3 = rho
    return HexagonRealization(1.0, r3, r2, r1 * r2 / sigma1, 1.0, sigma1 / r2)


def hexagon_from_solution(sol: ChartSolution) -> HexagonRealization:
    hexa = hexagon_from_invariants(sol.rho, sol.sigma1)
    if min(hexa.rho) <= 1.0 + 1e-12:
        raise InfeasibleChartError("hexagon has a side ratio <= 1")
    rs = hexa.rho + hexa.sigma
    want = tuple(sol.rho) + (sol.sigma1, sol.sigma2)
    bad = max(abs(a / b - 1.0) for a, b in zip(rs, want))
    if bad > 1e-10:
        raise ConsistencyError(f"hexagon invariants drift by {bad:.3g}")
    return hexa


def _chart_for(lifts) -> Optional[AffineChart]:
    """x+y+z=1 if every lift has positive sum, else the normalized-sum line."""
    v = np.asarray(lifts, dtype=float)
    for l in (np.ones(3), np.sum(v / np.linalg.norm(v, axis=1)[:, None], axis=0)):
        if np.all(v @ l > 1e-12 * np.linalg.norm(v, axis=1) * np.linalg.norm(l)):
            return AffineChart.from_line(l)
    return None


def convex_polygon_sides(lifts, tol: float = 1e-12):
    """Count strict convex corners of a cyclic sequence of lifts.

    Returns (n_sides, min relative turn). A convex n-gon with n distinct
    sides has all n turns strictly of one sign and total turning 2 pi.
    """
    chart = _chart_for(lifts)
    if chart is None:
        return 0, -math.inf
    xy = chart.coords(np.asarray(lifts, dtype=float))
    e = np.roll(xy, -1, axis=0) - xy
    en = np.roll(e, -1, axis=0)
    cr = e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]
    rel = cr / (np.linalg.norm(e, axis=1) * np.linalg.norm(en, axis=1))
    if np.sum(rel) < 0:
        rel = -rel
    turning = np.sum(np.arctan2(np.abs(cr), np.sum(e * en, axis=1)) * np.sign(rel))
    n = int(np.sum(rel > tol))
    if abs(turning - 2 * math.pi) > 1e-6:
        n = min(n, 0)
    return n, float(np.min(rel))


def hexagon_six_sides(hexa: HexagonRealization) -> bool:
    n, _ = convex_polygon_sides(hexa.outer_cycle())
    return n == 6


@dataclass(frozen=True, eq=False)
class PantsRealization:
    hexagon: HexagonRealization
    gammas: tuple  # three (3, 3) arrays
    chart: Optional[PantsChart] = None
    solution: Optional[ChartSolution] = None
    report: dict = field(default_factory=dict)

    @property
    def triangles(self):
        return self.hexagon.triangles()


def generator_matrices(hexa: HexagonRealization, kappa, mu, nu) -> tuple:
    a2, b1, c1, c2, a3, b3 = hexa.a2, hexa.b1, hexa.c1, hexa.c2, hexa.a3, hexa.b3
    k1, k2, k3 = kappa
    m1, m2, m3 = mu
    n1, n2, n3 = nu
    g1 = np.array([
        [k1, n1 * c2 * a3 + k1 * a2, n1 * a3],
        [0.0, n1 * c2 * b3 - m1, n1 * b3],
        [0.0, -n1 * c2, -n1],
    ])
    g2 = np.array([
        [-n2, 0.0, -n2 * a3],
        [n2 * b1, k2, n2 * a3 * b1 + k2 * b3],
        [n2 * c1, 0.0, n2 * a3 * c1 - m2],
    ])
    g3 = np.array([
        [n3 * b1 * a2 - m3, n3 * a2, 0.0],
        [-n3 * b1, -n3, 0.0],
        [n3 * b1 * c2 + k3 * c1, n3 * c2, k3],
    ])
    return g1, g2, g3


def verify_realization(real: PantsRealization) -> dict:
    """Residuals of every identity a realization must satisfy."""
    g1, g2, g3 = real.gammas
    hexa = real.hexagon
    e, f = hexa.e, hexa.f
    rep = {
        "relator": float(np.linalg.norm(g3 @ g2 @ g1 - np.eye(3))),
        "det": max(abs(float(np.linalg.det(g)) - 1.0) for g in real.gammas),
        "six_sides": hexagon_six_sides(hexa),
    }
    T = hexa.triangles()

    def same_vertices(A, B):
        A = [ProjPoint(a) for a in A]
        B = [ProjPoint(b) for b in B]
        return max(min(projective_distance(a.vec, b.vec) for b in B) for a in A)

    rep["adjacency"] = max(
        same_vertices(T[2] @ g1.T, T[3]),
        same_vertices(T[3] @ g2.T, T[1]),
        same_vertices(T[1] @ g3.T, T[2]),
    )
    if real.solution is not None:
        k, m, n = real.solution.kappa, real.solution.mu, real.solution.nu
        scale = max(1.0, max(np.linalg.norm(g) for g in real.gammas))
        rep["eigen"] = max(
            max(np.linalg.norm(g1 @ e[0] - k[0] * e[0]), np.linalg.norm(g1 @ f[1] - m[0] * e[1]),
                np.linalg.norm(g1 @ e[2] - n[0] * f[2])),
            max(np.linalg.norm(g2 @ e[1] - k[1] * e[1]), np.linalg.norm(g2 @ f[2] - m[1] * e[2]),
                np.linalg.norm(g2 @ e[0] - n[1] * f[0])),
            max(np.linalg.norm(g3 @ e[2] - k[2] * e[2]), np.linalg.norm(g3 @ f[0] - m[2] * e[0]),
                np.linalg.norm(g3 @ e[1] - n[2] * f[1])),
        ) / scale
    if real.chart is not None:
        inv = [invariants(g) for g in real.gammas]
        rep["lambda"] = max(abs(iv.lam - d.lam) / (1 + d.lam) for iv, d in zip(inv, real.chart.deltas))
        rep["tau"] = max(abs(iv.tau - d.tau) / (1 + abs(d.tau)) for iv, d in zip(inv, real.chart.deltas))
        rep["regions"] = [iv.region.value for iv in inv]
        rep["regions_match"] = all(iv.region == d.region for iv, d in zip(inv, real.chart.deltas))
        rep["trace"] = max(
            abs(float(np.trace(g)) - (d.lam + d.tau)) for g, d in zip(real.gammas, real.chart.deltas)
        )
    return rep


def build_generators(hexa: HexagonRealization, sol: ChartSolution, chart: Optional[PantsChart] = None,
                     verify: bool = True) -> PantsRealization:
    gammas = generator_matrices(hexa, sol.kappa, sol.mu, sol.nu)
    real = PantsRealization(hexa, gammas, chart, sol)
    if not verify:
        return real
    rep = verify_realization(real)
    if rep["relator"] > 1e-6:
        raise ConsistencyError(f"relator residual {rep['relator']:.3g}")
    return replace(real, report=rep)


def build_pants(chart: PantsChart, verify: bool = True) -> PantsRealization:
    sol = solve_chart(chart)
    return build_generators(hexagon_from_solution(sol), sol, chart, verify)


def invariants_of_realization(real: PantsRealization, tol: float = 1e-6) -> ChartSolution:
    """Read (kappa, mu, nu, rho, sigma) back off a realization in the standard frame.

    rho and sigma come from the outer vertices, kappa/mu/nu from how each
    generator moves them; small perturbations give small drift rather than
    an error.
    """
    e = np.eye(3)
    g = real.gammas
    for i in range(3):
        if projective_distance(g[i] @ e[i], e[i]) > tol:
            raise NormalizationError(
                f"generator {i + 1} does not fix coordinate point {i + 1}; conjugate to the standard frame first"
            )
    f = np.array(real.hexagon.f, dtype=float)
    # rescale each outer vertex so its i-th coordinate is -1
    f = f / (-np.diag(f))[:, None]
    hexa = HexagonRealization(f[1, 0], f[0, 1], f[0, 2], f[1, 2], f[2, 0], f[2, 1])
    kappa = tuple(float((g[i] @ e[i])[i]) for i in range(3))
    mu = (float((g[0] @ f[1])[1]), float((g[1] @ f[2])[2]), float((g[2] @ f[0])[0]))
    nu = (-float((g[0] @ e[2])[2]), -float((g[1] @ e[0])[0]), -float((g[2] @ e[1])[1]))
    s1, s2 = hexa.sigma
    return ChartSolution(kappa, mu, nu, hexa.rho, s1, s2)


def sample_boundary(rng: np.random.Generator, region: Region, lam_range=(0.2, 0.9)) -> BoundaryInvariant:
    """Random (lambda, tau) in a region; interior points avoid the edges by 5%."""
    region = Region(region)
    if region == Region.P:
        return BoundaryInvariant(1.0, 2.0, region)
    lam = float(rng.uniform(*lam_range))
    lo, hi = 2.0 / math.sqrt(lam), lam + lam**-2
    if region == Region.QH_NON_C1:
        tau = hi
    elif region == Region.QH_C1:
        tau = lo
    else:
        tau = lo + (hi - lo) * float(rng.uniform(0.05, 0.95))
    return BoundaryInvariant(lam, tau, region)


def sample_chart(rng: np.random.Generator, regions=(Region.R,) * 3, st_range=(0.1, 10.0)) -> PantsChart:
    ds = tuple(sample_boundary(rng, r) for r in regions)
    lo, hi = math.log(st_range[0]), math.log(st_range[1])
    s, t = math.exp(rng.uniform(lo, hi)), math.exp(rng.uniform(lo, hi))
    return PantsChart(ds, s, t)


def conic_tau(lam: float) -> float:
    """tau of a hyperbolic boundary with middle eigenvalue 1 (conic-preserving type)."""
    return 1.0 + 1.0 / lam


def conic_parameters(lams) -> tuple:
    """(s, t) at which the pants group preserves a conic.

    Valid when every boundary is cusped (lambda = 1) or hyperbolic with
    tau = 1 + 1/lambda. Found by solving tr(w) = tr(w^-1) numerically over
    short words and then matched in closed form: s = 1 and
    t = (1 + sqrt(l1 l3 / l2)) / l1.
    """
    l1, l2, l3 = (float(x) for x in lams)
    return 1.0, (1.0 + math.sqrt(l1 * l3 / l2)) / l1


def conic_chart(lams) -> PantsChart:
    """Chart of the conic-preserving pants with the given boundary lambdas (1 for cusps)."""
    ds = []
    for lam in lams:
        if lam == 1.0:
            ds.append(BoundaryInvariant(1.0, 2.0, Region.P))
        else:
            ds.append(BoundaryInvariant(float(lam), conic_tau(lam), Region.R))
    return PantsChart(tuple(ds), *conic_parameters(lams))
