import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import JORDAN, random_unimodular
from cpm.errors import DegenerateError, GeometryError, SingularActionError
from cpm.projective import (
    AffineChart,
    ProjLine,
    ProjPoint,
    act,
    act_line,
    common_eigenvector,
    cross_ratio,
    eigen_real3,
    line_through,
    meet,
    projective_distance,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = arrays(np.float64, 3, elements=finite).filter(lambda v: np.max(np.abs(v)) > 1e-3)


def test_point_normalization_rule():
    p = ProjPoint([2.0, -4.0, 1.0])
    assert p.coords == (-0.5, 1.0, -0.25)
    assert ProjPoint([-2.0, 4.0, -1.0]) == p


def test_zero_point_rejected():
    with pytest.raises(DegenerateError):
        ProjPoint([0.0, 0.0, 0.0])


@given(vec3)
def test_normalization_idempotent(v):
    p = ProjPoint(v)
    assert ProjPoint(p.coords).coords == p.coords


def test_act_identity_and_eigenvector():
    assert act(np.eye(3), [1, 2, 3]) == ProjPoint([1, 2, 3])
    assert act(np.diag([2, 1, 0.5]), [0, 0, 1]) == ProjPoint([0, 0, 1])


def test_act_jordan_block():
    assert act(JORDAN, [0, 0, 1]).close_to(ProjPoint([0, 1, 1]), 1e-15)


def test_act_singular():
    with pytest.raises(SingularActionError):
        act(np.diag([1.0, 1.0, 0.0]), [0, 0, 1])


def test_act_composition(rng):
    for _ in range(50):
        a, b = random_unimodular(rng), random_unimodular(rng)
        x = rng.normal(size=3)
        assert act(a @ b, x).close_to(act(a, act(b, x)), 1e-12)


def test_act_line_preserves_incidence(rng):
    for _ in range(50):
        g = random_unimodular(rng)
        x, y = rng.normal(size=(2, 3))
        l = line_through(x, y)
        assert act_line(g, l).contains(act(g, x), 1e-12)


def test_line_and_meet():
    assert line_through([1, 0, 0], [0, 1, 0]) == ProjLine([0, 0, 1])
    assert meet(ProjLine([1, 0, 0]), ProjLine([0, 1, 0])) == ProjPoint([0, 0, 1])
    with pytest.raises(DegenerateError):
        line_through([1, 2, 3], [2, 4, 6])
    with pytest.raises(DegenerateError):
        meet([1, 0, 0], [3, 0, 0])


def test_meet_of_lines_through_common_point(rng):
    for _ in range(100):
        a, b, c = rng.normal(size=(3, 3))
        assert meet(line_through(a, b), line_through(a, c)).close_to(ProjPoint(a), 1e-9)


def _affine(t):
    return np.array([t, 0.0, 1.0])


def test_cross_ratio_hand_value():
    assert cross_ratio(_affine(-1), _affine(0), _affine(0.5), _affine(1)) == pytest.approx(3.0, abs=1e-14)


def test_cross_ratio_equal_inner_points():
    assert cross_ratio(_affine(-1), _affine(0.2), _affine(0.2), _affine(1)) == pytest.approx(1.0, abs=1e-14)


def test_cross_ratio_infinite_when_endpoint_coincides():
    assert cross_ratio(_affine(0), _affine(0), _affine(0.5), _affine(1)) == math.inf


def test_cross_ratio_non_collinear():
    with pytest.raises(GeometryError):
        cross_ratio([1, 0, 1], [0, 1, 1], [0.5, 0, 1], [2, 0, 1])


def test_cross_ratio_projective_invariance(rng):
    base = [_affine(t) for t in (-1.0, -0.1, 0.4, 2.0)]
    ref = cross_ratio(*base)
    for _ in range(100):
        g = random_unimodular(rng)
        val = cross_ratio(*[g @ v for v in base])
        assert abs(val - ref) <= 1e-9 * ref


def test_eigen_diagonal():
    spec = eigen_real3(np.diag([0.25, 1.0, 4.0]))
    assert spec.eigenvalues == pytest.approx((0.25, 1.0, 4.0), abs=1e-14)
    assert [c.geometric for c in spec.clusters] == [1, 1, 1]


def test_eigen_jordan():
    spec = eigen_real3(JORDAN)
    assert len(spec.clusters) == 1
    c = spec.clusters[0]
    assert (c.algebraic, c.geometric) == (3, 1)
    assert c.value == pytest.approx(1.0)


def test_eigen_rotation_block():
    m = np.array([[1.0, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])
    spec = eigen_real3(m)
    assert not spec.is_real
    assert spec.eigenvalues == pytest.approx((1.0,))
    assert spec.complex_pair == pytest.approx(1j, abs=1e-12)


def test_eigen_reconstruction(rng):
    for _ in range(100):
        d = np.sort(np.exp(rng.uniform(-2, 2, size=3)))
        d /= np.cbrt(np.prod(d))
        g = random_unimodular(rng)
        m = g @ np.diag(d) @ np.linalg.inv(g)
        spec = eigen_real3(m)
        v = np.column_stack([c.vectors[:, 0] for c in spec.clusters])
        lam = np.array([c.value for c in spec.clusters])
        rec = v @ np.diag(lam) @ np.linalg.inv(v)
        assert np.linalg.norm(rec - m) <= 1e-7 * np.linalg.norm(m)
        assert abs(np.prod(spec.eigenvalues) - 1.0) <= 1e-6


def test_affine_chart_round_trip(rng):
    chart = AffineChart.from_line([0.3, -0.2, 1.0])
    xy = rng.normal(size=(20, 2))
    assert np.allclose(chart.coords(chart.lift(xy)), xy, atol=1e-12)
    with pytest.raises(GeometryError):
        chart.coords(np.array([1.0, 1.5, 0.0]))


def test_common_eigenvector():
    v = common_eigenvector([np.diag([2, 1, 0.5]), np.diag([3, 1, 1 / 3])])
    assert projective_distance(v, [1, 0, 0]) < 1e-12
    assert common_eigenvector([JORDAN, JORDAN.T]) is None
