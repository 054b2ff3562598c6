import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debond.exceptions import DomainError, RangeError
from debond.geometry import (DebondingFront, Region, classify, front_from_ell_dot, r_bounds,
                             region_codes, stationary_front)


@pytest.fixture
def still():
    return stationary_front(1.0, 2.0)


def test_constant_front_maps(still):
    t = np.array([0.0, 0.3, 1.7])
    assert np.allclose(still.ell(t), 1.0)
    assert np.allclose(still.phi(t), t - 1)
    assert np.allclose(still.psi(t), t + 1)
    s = np.array([1.0, 1.5, 2.9])
    assert np.allclose(still.omega(s), s - 2)
    assert np.allclose(still.psi_inv(s), s - 1)
    assert still.omega(1.0) == pytest.approx(-1.0)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.8])
def test_constant_speed_omega_dot(c):
    fr = front_from_ell_dot(1.0, lambda t: c, T=1.0, h=1 / 64)
    s = np.linspace(fr.psi(0.0), fr.psi(1.0), 50)
    assert np.allclose(fr.omega_dot(s), (1 - c) / (1 + c))


def test_accelerating_front_matches_quadrature():
    fr = front_from_ell_dot(1.0, lambda t: t / (t + 2), T=1.0, h=1 / 256)
    assert fr.ell(1.0) == pytest.approx(1 + 1 - 2 * math.log(1.5), abs=1e-8)


def test_speed_one_is_rejected():
    with pytest.raises(DomainError):
        front_from_ell_dot(1.0, lambda t: 1.0)
    with pytest.raises(DomainError):
        DebondingFront(1.0, [-1.0, -0.5], [0.0, 0.4])  # receding


def test_out_of_range(still):
    with pytest.raises(RangeError):
        still.ell(2.5)
    with pytest.raises(RangeError):
        still.omega(0.5)


@pytest.mark.parametrize("t,x,tag", [(0.25, 0.5, Region.OMEGA1), (0.6, 0.2, Region.OMEGA2),
                                     (0.3, 0.9, Region.OMEGA3), (0.2, 1.1, Region.OUTSIDE)])
def test_classify(still, t, x, tag):
    assert classify(t, x, still) == tag


def test_r_bounds_examples(still):
    assert r_bounds(0.1, 0.3, 0.5, still) == pytest.approx((0.3, 0.7))
    assert r_bounds(0.2, 0.6, 0.2, still) == pytest.approx((0.2, 0.6))
    g1, g2 = r_bounds(0.1, 0.3, 0.9, still)
    assert g2 == pytest.approx(0.9)
    assert g1 == pytest.approx(0.7)
    with pytest.raises(DomainError):
        r_bounds(0.1, 0.3, 1.2, still)


def test_csv_round_trip():
    fr = front_from_ell_dot(1.0, lambda t: 0.5 * t, T=0.5, h=1 / 32)
    back = DebondingFront.from_csv(fr.to_csv())
    assert np.array_equal(back.y, fr.y) and np.array_equal(back.lam_nodes, fr.lam_nodes)


speeds = st.lists(st.floats(0.0, 0.95), min_size=2, max_size=12)


def _random_front(sp):
    t = np.linspace(0, 1, len(sp) + 1)
    ell = 1.0 + np.concatenate([[0.0], np.cumsum(np.array(sp) * np.diff(t))])
    return DebondingFront(1.0, t - ell, t)


@settings(max_examples=60, deadline=None)
@given(speeds)
def test_random_front_invariants(sp):
    fr = _random_front(sp)
    slopes = np.diff(fr.ell_nodes) / np.diff(fr.lam_nodes)
    assert np.all(slopes >= -1e-12) and np.all(slopes < 1)
    s = np.linspace(fr.psi_nodes[0], fr.psi_nodes[-1], 200)
    od = fr.omega_dot(s)
    assert np.all(od > 0) and np.all(od <= 1 + 1e-12)
    psi_dot = np.diff(fr.psi_nodes) / np.diff(fr.lam_nodes)
    assert np.all(psi_dot >= 1 - 1e-12) and np.all(psi_dot < 2)
    assert np.allclose(fr.phi(fr.lam(fr.y)), fr.y, atol=1e-12)
    ts = np.linspace(0, 1, 101)
    assert np.allclose(fr.omega(fr.psi(ts)), fr.phi(ts), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(speeds, st.floats(0.01, 0.45), st.floats(0.0, 1.0))
def test_r_bounds_ordered_and_triangle_area(sp, t, frac):
    fr = _random_front(sp)
    x = frac * fr.ell(t)
    if classify(t, x, fr) == Region.OUTSIDE:
        return
    taus = np.linspace(0, t, 201)
    g = np.array([r_bounds(tau, t, x, fr) for tau in taus])
    assert np.all(g[:, 0] <= g[:, 1] + 1e-12)
    if classify(t, x, fr) == Region.OMEGA1:
        area = np.trapezoid(g[:, 1] - g[:, 0], taus)
        assert area == pytest.approx(t * t, rel=1e-9)


def test_region_codes_partition():
    t, x = np.meshgrid(np.linspace(0, 0.5, 41), np.linspace(0, 1, 81), indexing="ij")
    codes = region_codes(t, x, 1.0, np.ones_like(t))
    assert set(np.unique(codes)) <= {0, 1, 2, 3}
    assert np.all(codes[(t <= x) & (t + x <= 1)] == 1)
