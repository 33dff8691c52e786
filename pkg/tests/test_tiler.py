import numpy as np
import pytest

from cpm import words as W
from cpm.classify import BoundaryInvariant, Region, Tag, classify, fixed_data
from cpm.errors import RangeError
from cpm.pants import PantsChart, PantsRealization, build_pants, hexagon_from_invariants, sample_chart
from cpm.projective import ProjLine, ProjPoint, projective_distance
from cpm.tiler import (
    boundary_polyline,
    cell_count,
    certify_convex,
    check_properly_convex,
    distance_to_boundary,
    expand_orbit,
)

CUSP = BoundaryInvariant(1.0, 2.0, Region.P)
CUSP_REAL = build_pants(PantsChart((CUSP, CUSP, CUSP), 1.0, 1.0))


def region_r_pants(seed):
    return build_pants(sample_chart(np.random.default_rng(seed), (Region.R,) * 3))


def inside_hull(xy, hull, eps):
    e = np.roll(hull, -1, axis=0) - hull
    n = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
    return np.all(xy @ n.T - np.sum(n * hull, axis=1) <= eps)


def test_depth_zero_is_the_hexagon():
    approx = expand_orbit(CUSP_REAL, 0)
    assert len(approx.cells) == 4
    assert [c.label for c in approx.cells] == ["1.T0", "1.T1", "g2^-1.T1", "g3.T1"]
    assert len(boundary_polyline(approx)) == 6
    cert = certify_convex(approx)
    assert cert.passed and cert.six_sides


@pytest.mark.parametrize("depth", range(5))
def test_cell_counts(depth):
    approx = expand_orbit(CUSP_REAL, depth)
    assert len(approx.cells) == cell_count(depth) == 3 * 2 ** (depth + 1) - 2
    assert len({(c.kind, c.word) for c in approx.cells}) == len(approx.cells)


def test_cusp_pants_depth3_certificate():
    cert = certify_convex(expand_orbit(CUSP_REAL, 3))
    assert cert.disjoint and cert.disjoint_witness is None
    assert cert.convexity_defect >= 0 and cert.hull_contains_all
    assert cert.passed and cert.pairs_checked > 0
    assert cert.to_dict()["passed"] is True


def test_equivariance():
    real = region_r_pants(3)
    approx = expand_orbit(real, 3)
    g1 = real.gammas[0]
    g1_word = (("g2", -1), ("g3", -1))  # cell words use g2, g3 only; g1 = g2^-1 g3^-1
    where = {(c.kind, c.word): k for k, c in enumerate(approx.cells)}
    hits = 0
    for k, c in enumerate(approx.cells):
        moved = (c.kind, W.mul(g1_word, c.word))
        if moved not in where:
            continue
        a = approx.lifts[k] @ g1.T
        b = approx.lifts[where[moved]]
        for u, v in zip(a, b):
            assert projective_distance(u, v) <= 1e-9
        hits += 1
    assert hits >= 10


def test_corrupted_hexagon_fails_six_sides():
    bad = hexagon_from_invariants((0.9, 4.0, 4.0), 4.0)
    approx = expand_orbit(PantsRealization(bad, CUSP_REAL.gammas), 0)
    cert = certify_convex(approx)
    assert cert.six_sides is False and not cert.passed


def test_hull_nesting():
    for real in (CUSP_REAL, region_r_pants(4)):
        hulls = [expand_orbit(real, d) for d in range(5)]
        for small, big in zip(hulls, hulls[1:]):
            xy = big.chart.coords(np.array([p.vec for p in small.boundary]))
            assert inside_hull(xy, big.boundary_coords(), 1e-10)


def test_hull_grows_for_region_r():
    real = region_r_pants(5)
    sizes = [len(expand_orbit(real, d).boundary) for d in range(4)]
    assert sizes == sorted(sizes) and sizes[-1] > sizes[0]


def test_fixed_points_near_depth4_hull():
    for real in (CUSP_REAL, region_r_pants(6)):
        approx = expand_orbit(real, 4)
        for g in real.gammas:
            data = fixed_data(g)
            keys = ("p+", "p-") if classify(g).tag == Tag.HYPERBOLIC else ("p",)
            for key in keys:
                assert distance_to_boundary(approx, data[key]) <= 1e-6


def test_properly_convex_on_built_pants():
    for real in (CUSP_REAL, region_r_pants(7), region_r_pants(8)):
        res = check_properly_convex(real)
        assert res and res.witness is None


def test_powers_share_fixed_points():
    g = region_r_pants(9).gammas[0]
    res = check_properly_convex([g, g @ g, g @ g @ g])
    assert not res
    assert isinstance(res.witness, ProjPoint)
    assert any(res.witness.close_to(fixed_data(g)[k], 1e-8) for k in ("p+", "p0", "p-"))


def test_block_triangular_triple_is_reducible(rng):
    mats = []
    for _ in range(3):
        m = np.triu(rng.normal(size=(3, 3)))
        m[1:, 1:] = rng.normal(size=(2, 2))
        mats.append(m / np.cbrt(abs(np.linalg.det(m))))
    res = check_properly_convex(mats)
    assert not res
    assert projective_distance(res.witness.vec, np.array([1.0, 0, 0])) <= 1e-9


def test_invariant_line_witness(rng):
    # transposes of the block triple share e1, so the line x = 0 is invariant
    mats = []
    for _ in range(3):
        m = np.zeros((3, 3))
        m[0, 0] = rng.uniform(0.5, 2)
        m[1:, :] = rng.normal(size=(2, 3))
        mats.append(m)
    res = check_properly_convex(mats)
    assert not res and isinstance(res.witness, ProjLine)
    assert projective_distance(res.witness.vec, np.array([1.0, 0, 0])) <= 1e-9


def test_depth_range():
    with pytest.raises(RangeError):
        expand_orbit(CUSP_REAL, -1)
    with pytest.raises(RangeError):
        expand_orbit(CUSP_REAL, 9)
    with pytest.raises(RangeError):
        expand_orbit(CUSP_REAL, 1.5)


def test_deterministic():
    real = region_r_pants(10)
    a, b = expand_orbit(real, 3), expand_orbit(real, 3)
    assert [c.label for c in a.cells] == [c.label for c in b.cells]
    assert np.array_equal(a.lifts, b.lifts)
    assert np.array_equal(a.boundary_coords(), b.boundary_coords())
