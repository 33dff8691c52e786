import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CUSP_G1, JORDAN, random_unimodular
from cpm.classify import (
    BoundaryInvariant,
    Region,
    Tag,
    classify,
    fixed_data,
    inverse_invariants,
    invariants,
    region_of,
    spectrum_of,
)
from cpm.errors import DomainError, NotAutomorphismError, NotBoundaryTypeError, UnsupportedClassError
from cpm.projective import ProjPoint, act, act_line, projective_distance


def test_parabolic_block():
    assert classify(JORDAN).tag == Tag.PARABOLIC


def test_identity():
    assert classify(np.eye(3)).tag == Tag.IDENTITY


def test_hyperbolic_params():
    c = classify(np.diag([4.0, 1.0, 0.25]))
    assert c.tag == Tag.HYPERBOLIC
    assert c.params == pytest.approx((4.0, 1.0, 0.25), abs=1e-12)


def test_planar():
    c = classify(np.diag([2.0, 2.0, 0.25]))
    assert c.tag == Tag.PLANAR
    assert c.params == pytest.approx((2.0, 0.25))


def test_quasi_hyperbolic():
    m = np.array([[0.5, 1, 0], [0, 0.5, 0], [0, 0, 4.0]])
    assert classify(m).tag == Tag.QUASI_HYPERBOLIC


def test_elliptic():
    th = 1.1
    m = np.array([[1, 0, 0], [0, math.cos(th), -math.sin(th)], [0, math.sin(th), math.cos(th)]])
    c = classify(m)
    assert c.tag == Tag.ELLIPTIC
    assert c.params[0] == pytest.approx(th)


def test_rejections():
    with pytest.raises(DomainError):
        classify(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(DomainError):
        classify(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(NotAutomorphismError):
        classify(np.diag([-2.0, -0.5, 1.0]))


def test_rescales_positive_determinant():
    assert classify(8 * np.diag([4.0, 1.0, 0.25])).params == pytest.approx((4.0, 1.0, 0.25))


def test_invariants_examples():
    inv = invariants(np.diag([4.0, 1.0, 0.25]))
    assert (inv.lam, inv.tau, inv.region) == (pytest.approx(0.25), pytest.approx(5.0), Region.R)
    inv = invariants(JORDAN)
    assert (inv.lam, inv.tau, inv.region) == (1.0, 2.0, Region.P)
    inv = invariants(np.array([[0.5, 1, 0], [0, 0.5, 0], [0, 0, 4.0]]))
    assert inv.lam == pytest.approx(0.5) and inv.tau == pytest.approx(4.5)
    assert inv.region == Region.QH_NON_C1


def test_invariants_complex_spectrum():
    m = np.array([[1, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])
    with pytest.raises(NotBoundaryTypeError):
        invariants(m)


def test_region_of_edges():
    lam = 0.25
    assert region_of(lam, 5.0) == Region.R
    assert region_of(lam, lam + lam**-2) == Region.QH_NON_C1
    assert region_of(lam, 2 / math.sqrt(lam)) == Region.QH_C1
    assert region_of(1.0, 2.0) == Region.P
    with pytest.raises(NotBoundaryTypeError):
        region_of(lam, 3.0)
    with pytest.raises(NotBoundaryTypeError):
        region_of(1.5, 3.0)


def test_inverse_swaps_quasi_hyperbolic_regions():
    lam = 0.3
    d = BoundaryInvariant(lam, lam + lam**-2, Region.QH_NON_C1).inverse()
    assert d.region == Region.QH_C1
    assert region_of(d.lam, d.tau) == Region.QH_C1


def test_inverse_invariants_are_spectral(rng):
    for _ in range(50):
        lam = rng.uniform(0.1, 0.9)
        tau = rng.uniform(2 / math.sqrt(lam), lam + lam**-2)
        m = np.diag(spectrum_of(lam, tau))
        inv = invariants(np.linalg.inv(m))
        assert (inv.lam, inv.tau) == pytest.approx(inverse_invariants(lam, tau), rel=1e-12)


def test_conjugation_invariance(rng):
    for _ in range(200):
        d = np.sort(np.exp(rng.uniform(-2, 2, size=3)))
        d /= np.cbrt(np.prod(d))
        m = np.diag(d)
        g = random_unimodular(rng)
        c = g @ m @ np.linalg.inv(g)
        assert classify(c).tag == classify(m).tag
        a, b = invariants(m), invariants(c)
        assert abs(a.lam - b.lam) <= 1e-7 * (1 + a.lam)
        assert abs(a.tau - b.tau) <= 1e-7 * (1 + a.tau)


def test_tag_region_agreement_on_random_spectra(rng):
    # hyperbolic <-> R, quasi-hyperbolic <-> one of the two edges
    for _ in range(2000):
        kind = rng.integers(3)
        a = float(np.exp(rng.uniform(-1.5, 1.5)))
        if kind == 0:
            d = np.exp(rng.uniform(-2, 2, size=3))
            d /= np.cbrt(np.prod(d))
            m = np.diag(d)
        else:
            m = np.array([[a, 1, 0], [0, a, 0], [0, 0, a**-2]])
        g = random_unimodular(rng)
        m = g @ m @ np.linalg.inv(g)
        c = classify(m)
        r = invariants(m).region
        if c.tag == Tag.HYPERBOLIC:
            assert r == Region.R
        elif c.tag == Tag.QUASI_HYPERBOLIC:
            assert r in (Region.QH_C1, Region.QH_NON_C1)
        else:
            assert c.tag == Tag.PARABOLIC and r == Region.P


def test_fixed_data_diagonal():
    fd = fixed_data(np.diag([4.0, 1.0, 0.25]))
    assert fd["p+"] == ProjPoint([1, 0, 0])
    assert fd["p0"] == ProjPoint([0, 1, 0])
    assert fd["p-"] == ProjPoint([0, 0, 1])


def test_fixed_data_parabolic():
    fd = fixed_data(JORDAN)
    assert fd["p"] == ProjPoint([1, 0, 0])
    assert projective_distance(act_line(JORDAN, fd["D"]).vec, fd["D"].vec) < 1e-12
    assert fd["D"].contains(fd["p"])


def test_fixed_data_equivariance(rng):
    for _ in range(30):
        g = random_unimodular(rng)
        m = g @ np.diag([4.0, 1.0, 0.25]) @ np.linalg.inv(g)
        fd = fixed_data(m)
        for name, k in (("p+", 0), ("p0", 1), ("p-", 2)):
            assert fd[name].close_to(act(g, np.eye(3)[k]), 1e-9)


def test_inverse_duality(rng):
    for _ in range(30):
        g = random_unimodular(rng)
        m = g @ np.diag([3.0, 0.8, 1 / 2.4]) @ np.linalg.inv(g)
        assert fixed_data(np.linalg.inv(m))["p+"].close_to(fixed_data(m)["p-"], 1e-9)


def test_fixed_data_unsupported():
    with pytest.raises(UnsupportedClassError):
        fixed_data(np.eye(3))
    with pytest.raises(UnsupportedClassError):
        fixed_data(np.diag([2.0, 2.0, 0.25]))
    planar = fixed_data(np.diag([2.0, 2.0, 0.25]), allow_planar=True)
    assert planar["p"] == ProjPoint([0, 0, 1])


def test_cusp_generator_is_parabolic():
    assert classify(CUSP_G1).tag == Tag.PARABOLIC
    assert invariants(CUSP_G1).region == Region.P


@given(st.floats(0.05, 0.95), st.floats(0.02, 0.98), st.integers(0, 2**32 - 1))
def test_invariants_conjugation_property(lam, frac, seed):
    lo, hi = 2 / math.sqrt(lam), lam + lam**-2
    tau = lo + frac * (hi - lo)
    g = random_unimodular(np.random.default_rng(seed))
    m = g @ np.diag(spectrum_of(lam, tau)) @ np.linalg.inv(g)
    inv = invariants(m)
    assert inv.region == Region.R and classify(m).tag == Tag.HYPERBOLIC
    assert abs(inv.lam - lam) <= 1e-7 * (1 + lam)
    assert abs(inv.tau - tau) <= 1e-7 * (1 + tau)
