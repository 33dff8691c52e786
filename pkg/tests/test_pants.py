import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CUSP_G1, random_unimodular
from cpm.classify import BoundaryInvariant, Region, Tag, classify, invariants
from cpm.errors import NormalizationError, RangeError
from cpm.pants import (
    HexagonRealization,
    PantsChart,
    PantsRealization,
    build_generators,
    build_pants,
    conic_chart,
    hexagon_from_invariants,
    hexagon_from_solution,
    hexagon_six_sides,
    invariants_of_realization,
    sample_chart,
    solve_chart,
    verify_realization,
)

CUSP = BoundaryInvariant(1.0, 2.0, Region.P)
CUSP_CHART = PantsChart((CUSP, CUSP, CUSP), 1.0, 1.0)
REGIONS = (Region.R, Region.QH_NON_C1, Region.QH_C1, Region.P)


def mixed_charts(n, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        regions = tuple(REGIONS[k] for k in rng.integers(0, 4, size=3))
        out.append(sample_chart(rng, regions))
    return out


def test_cusp_solution():
    sol = solve_chart(CUSP_CHART)
    for name in ("kappa", "mu", "nu"):
        assert getattr(sol, name) == pytest.approx((1, 1, 1), abs=1e-12)
    assert sol.rho == pytest.approx((4, 4, 4), abs=1e-12)
    assert (sol.sigma1, sol.sigma2) == pytest.approx((4, 16), abs=1e-12)


def test_cusp_solution_at_s2():
    sol = solve_chart(PantsChart((CUSP, CUSP, CUSP), 2.0, 1.0))
    assert sol.rho == pytest.approx((9, 9, 9), abs=1e-12)


def test_hexagon_by_hand():
    h = hexagon_from_invariants((2.0, 3.0, 4.0), 6.0)
    assert (h.a2, h.a3, h.c1, h.b3, h.c2, h.b1) == (1, 1, 3, 2, 1, 4)
    assert h.a3 * h.b1 * h.c2 == pytest.approx(2 * 3 * 4 / 6)


def test_cusp_hexagon():
    h = hexagon_from_solution(solve_chart(CUSP_CHART))
    assert (h.c1, h.b3, h.c2, h.b1) == pytest.approx((4, 1, 4, 4), abs=1e-12)


def test_gauge_independence():
    h = hexagon_from_invariants((2.0, 3.0, 4.0), 6.0)
    d = np.diag([1.0, 2.0, 0.7])  # diagonal change of basis, outer vertices rescaled back
    f = h.f @ d
    f = f / (-np.diag(f))[:, None]
    g = HexagonRealization(f[1, 0], f[0, 1], f[0, 2], f[1, 2], f[2, 0], f[2, 1])
    assert g.a2 != 1.0
    assert g.rho == pytest.approx(h.rho, rel=1e-14)
    assert g.sigma == pytest.approx(h.sigma, rel=1e-14)
    r = g.regauge()
    assert (r.a2, r.a3) == (1.0, 1.0)
    assert (r.b1, r.c1, r.c2, r.b3) == pytest.approx((h.b1, h.c1, h.c2, h.b3), rel=1e-14)


def test_cusp_generator_matrix():
    real = build_pants(CUSP_CHART)
    g1 = real.gammas[0]
    assert np.max(np.abs(g1 - CUSP_G1)) <= 1e-12
    n = g1 - np.eye(3)
    assert np.linalg.det(g1) == pytest.approx(1.0, abs=1e-12)
    assert np.trace(g1) == pytest.approx(3.0, abs=1e-12)
    assert np.linalg.norm(n @ n) > 1
    assert np.linalg.norm(n @ n @ n) <= 1e-12


def test_random_charts_satisfy_all_identities():
    for chart in mixed_charts(100):
        real = build_pants(chart)
        rep = real.report
        sol = real.solution
        assert rep["relator"] <= 1e-9
        assert rep["det"] <= 1e-10
        assert rep["eigen"] <= 1e-10
        assert rep["adjacency"] <= 1e-9
        assert rep["six_sides"]
        res = sol.residuals(chart.taus)
        assert max(res.values()) <= 1e-10
        assert sol.kappa == chart.lams
        for g, d in zip(real.gammas, chart.deltas):
            assert abs(np.trace(g) - (d.lam + d.tau)) <= 1e-9 * (1 + abs(d.tau))
            assert np.trace(g) >= 3 - 1e-8


def test_classify_matches_region_tags():
    expected = {Region.R: Tag.HYPERBOLIC, Region.QH_NON_C1: Tag.QUASI_HYPERBOLIC,
                Region.QH_C1: Tag.QUASI_HYPERBOLIC, Region.P: Tag.PARABOLIC}
    for chart in mixed_charts(100, seed=8):
        real = build_pants(chart)
        for g, d in zip(real.gammas, chart.deltas):
            assert classify(g).tag == expected[d.region]
            inv = invariants(g)
            assert inv.region == d.region
            assert abs(inv.lam - d.lam) <= 1e-8 * (1 + d.lam)
            assert abs(inv.tau - d.tau) <= 1e-8 * (1 + abs(d.tau))


def test_round_trip():
    for chart in [CUSP_CHART] + mixed_charts(100, seed=9):
        sol = solve_chart(chart)
        back = invariants_of_realization(build_generators(hexagon_from_solution(sol), sol))
        for name in ("kappa", "mu", "nu", "rho"):
            assert getattr(back, name) == pytest.approx(getattr(sol, name), rel=1e-9)
        assert (back.sigma1, back.sigma2) == pytest.approx((sol.sigma1, sol.sigma2), rel=1e-9)


def test_perturbed_realization_drifts_a_little(rng):
    real = build_pants(mixed_charts(1, seed=10)[0])
    h = real.hexagon
    jit = HexagonRealization(*(x * (1 + 1e-3 * rng.uniform(-1, 1)) for x in (h.a2, h.b1, h.c1, h.c2, h.a3, h.b3)))
    back = invariants_of_realization(PantsRealization(jit, real.gammas))
    drift = max(abs(a / b - 1) for a, b in zip(back.rho + (back.sigma1,), real.solution.rho + (real.solution.sigma1,)))
    assert 0 < drift <= 1e-2


def test_non_normalized_rejected(rng):
    real = build_pants(CUSP_CHART)
    g = random_unimodular(rng)
    moved = PantsRealization(real.hexagon, tuple(g @ m @ np.linalg.inv(g) for m in real.gammas))
    with pytest.raises(NormalizationError):
        invariants_of_realization(moved)


def test_chart_injectivity_probe(rng):
    base = mixed_charts(1, seed=11)[0]
    for _ in range(50):
        s1, t1, s2, t2 = np.exp(rng.uniform(-2, 2, size=4))
        if math.hypot(s1 - s2, t1 - t2) < 1e-3:
            continue
        a = solve_chart(PantsChart(base.deltas, s1, t1))
        b = solve_chart(PantsChart(base.deltas, s2, t2))
        gap = np.max(np.abs(np.r_[a.rho, a.sigma1, a.sigma2] - np.r_[b.rho, b.sigma1, b.sigma2]))
        assert gap >= 1e-6


def test_range_checks():
    with pytest.raises(RangeError):
        PantsChart((CUSP, CUSP, CUSP), 0.0, 1.0)
    with pytest.raises(RangeError):
        PantsChart((CUSP, CUSP, CUSP), 1.0, 1e9)
    with pytest.raises(RangeError):
        PantsChart.make([1, 1], [2, 2], 1, 1)


def test_make_assigns_regions():
    lam = 0.25
    c = PantsChart.make([lam, lam, 1.0], [5.0, lam + lam**-2, 2.0], 1, 1)
    assert [d.region for d in c.deltas] == [Region.R, Region.QH_NON_C1, Region.P]


def test_corrupted_hexagon_has_fewer_sides():
    ok = hexagon_from_solution(solve_chart(CUSP_CHART))
    assert hexagon_six_sides(ok)
    bad = hexagon_from_invariants((0.9, 4.0, 4.0), 4.0)
    assert not hexagon_six_sides(bad)
    assert not verify_realization(PantsRealization(bad, build_pants(CUSP_CHART).gammas))["six_sides"]


def test_conic_chart_preserves_a_conic():
    # the invariant symmetric forms S with g^T S g = S span the null space below
    def smallest(real):
        rows = [np.kron(g.T, g.T) - np.eye(9) for g in real.gammas]
        sv = np.linalg.svd(np.vstack(rows), compute_uv=False)
        return sv[-1] / sv[0]

    for lams in [(1.0, 1.0, 1.0), (0.2, 1.0, 1.0), (0.2, 0.15, 0.3)]:
        chart = conic_chart(lams)
        assert smallest(build_pants(chart)) <= 1e-12
        bent = PantsChart(chart.deltas, 1.3 * chart.s, chart.t)
        assert smallest(build_pants(bent)) >= 1e-4


@given(
    st.floats(0.1, 0.9), st.floats(0.1, 0.9), st.floats(0.1, 0.9),
    st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95),
    st.floats(-2.3, 2.3), st.floats(-2.3, 2.3),
)
def test_relator_property(l1, l2, l3, f1, f2, f3, ls, lt):
    ds = []
    for lam, f in ((l1, f1), (l2, f2), (l3, f3)):
        lo, hi = 2 / math.sqrt(lam), lam + lam**-2
        ds.append(BoundaryInvariant(lam, lo + f * (hi - lo), Region.R))
    real = build_pants(PantsChart(tuple(ds), math.exp(ls), math.exp(lt)))
    g1, g2, g3 = real.gammas
    assert np.linalg.norm(g3 @ g2 @ g1 - np.eye(3)) <= 1e-9
    assert max(real.solution.residuals([d.tau for d in ds]).values()) <= 1e-10
