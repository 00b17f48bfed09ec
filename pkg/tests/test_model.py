import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeezechain.errors import DegenerateMode, InvalidParameters
from squeezechain.model import (ModelParams, bogoliubov_angle, bogoliubov_frame, dispersion,
                                max_group_velocity, momentum_grid)


@pytest.mark.parametrize("n, delta", [(1, 0.8), (0, 0.5), (4, 0.0), (4, -0.1), (4, 1.2), (2.5, 0.5)])
def test_params_rejected(n, delta):
    with pytest.raises(InvalidParameters):
        ModelParams(n, delta)


def test_coupling_fixed():
    with pytest.raises(InvalidParameters):
        ModelParams(4, 0.5, coupling=2.0)


def test_grid_n4():
    g = momentum_grid(ModelParams(4, 0.8))
    assert np.allclose(sorted(g.modes), sorted([0, np.pi / 2, -np.pi / 2, np.pi]))


def test_grid_n3():
    g = momentum_grid(ModelParams(3, 0.8))
    assert np.allclose(sorted(g.modes), sorted([0, 2 * np.pi / 3, -2 * np.pi / 3]))


def test_grid_n100():
    g = momentum_grid(ModelParams(100, 0.8))
    assert len(g) == 100
    assert np.isclose(g.modes[g.modes > 0].min(), np.pi / 50)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 10, 101])
@pytest.mark.parametrize("antiperiodic", [False, True])
def test_grid_structure(n, antiperiodic):
    g = momentum_grid(ModelParams(n, 0.5), antiperiodic=antiperiodic)
    k = g.modes
    assert len(k) == n
    assert np.all(k > -np.pi) and np.all(k <= np.pi)
    assert len(np.unique(np.round(k, 12))) == n
    has_pi = np.any(np.isclose(k, np.pi))
    assert has_pi == ((n % 2 == 0) != antiperiodic)
    assert np.isclose(k.sum(), np.pi if has_pi else 0.0)
    rest = k[~np.isclose(k, np.pi)]
    assert np.allclose(np.sort(rest), np.sort(-rest))
    # exact trig at the self-conjugate modes
    assert np.all(g.sin[np.isclose(k, np.pi)] == 0.0)
    assert np.all(g.sin[k == 0] == 0.0)


def test_dispersion_examples():
    p = ModelParams(10, 0.8)
    assert dispersion(p, 1.0, np.pi) == pytest.approx(0.0, abs=1e-15)
    assert dispersion(ModelParams(10, 0.37), 2.0, 0.0) == pytest.approx(3.0)
    assert dispersion(p, 0.5, np.pi / 2) == pytest.approx(np.sqrt(0.25 + 0.64), rel=1e-14)


def test_angle_examples():
    p = ModelParams(10, 0.8)
    assert bogoliubov_angle(p, 2.0, 0.0) == 0.0
    assert bogoliubov_angle(ModelParams(10, 0.8), 0.5, np.pi) == pytest.approx(np.pi / 2)
    assert bogoliubov_angle(p, 0.0, np.pi / 2) == pytest.approx(np.pi / 4)


def test_angle_degenerate_mode():
    with pytest.raises(DegenerateMode):
        bogoliubov_angle(ModelParams(10, 0.8), 1.0, np.pi)


def test_frame_degenerate_mode_uses_zero_angle():
    p = ModelParams(8, 0.8)
    f = bogoliubov_frame(p, 1.0)
    g = momentum_grid(p)
    at_pi = g.m == 4
    assert f.energy[at_pi][0] == 0.0
    assert f.theta[at_pi][0] == 0.0


def test_energy_zero_only_at_critical_pi():
    rng = np.random.default_rng(3)
    h = np.concatenate(([1.0] * 50, rng.uniform(0, 3, 9950)))
    k = np.concatenate((np.full(50, np.pi), rng.uniform(-np.pi, np.pi, 9950)))
    e = dispersion(ModelParams(4, 0.8), h, k)
    assert np.all(e >= 0)
    assert np.all(e[:50] < 1e-15)
    assert np.all(e[50:] > 1e-6)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 60), delta=st.floats(0.01, 1.0), h=st.floats(0.0, 4.0))
def test_frame_trig_identities(n, delta, h):
    p = ModelParams(n, delta)
    g = momentum_grid(p)
    f = bogoliubov_frame(p, h, g)
    ok = f.energy > 1e-12
    assert np.allclose(np.cos(2 * f.theta[ok]), f.a_coeff[ok] / f.energy[ok], atol=1e-12)
    assert np.allclose(np.sin(2 * f.theta[ok]), f.b_coeff[ok] / f.energy[ok], atol=1e-12)
    assert np.all(2 * f.theta > -np.pi - 1e-15) and np.all(2 * f.theta <= np.pi)


@settings(max_examples=200, deadline=None)
@given(delta=st.floats(0.01, 1.0), h=st.floats(0.0, 4.0), k=st.floats(-3.1, 3.1))
def test_parity_under_k_reflection(delta, h, k):
    p = ModelParams(4, delta)
    assert dispersion(p, h, k) == pytest.approx(dispersion(p, h, -k), abs=1e-14)
    if dispersion(p, h, k) > 1e-9:
        a, b = bogoliubov_angle(p, h, k), bogoliubov_angle(p, h, -k)
        assert np.sin(2 * b) == pytest.approx(-np.sin(2 * a), abs=1e-12)
        assert np.cos(2 * b) == pytest.approx(np.cos(2 * a), abs=1e-12)


def test_group_velocity_critical():
    assert max_group_velocity(ModelParams(10, 0.8), 1.0) == 0.8
    assert max_group_velocity(ModelParams(10, 1.0), 1.0) == 1.0


def _analytic_scan(delta, h, points=10**6):
    k = np.linspace(-np.pi, np.pi, points)
    e = np.hypot(np.cos(k) + h, delta * np.sin(k))
    de = (-(np.cos(k) + h) * np.sin(k) + delta**2 * np.sin(k) * np.cos(k)) / e
    return np.abs(de).max()


@pytest.mark.parametrize("delta, h", [(0.8, 2.0), (0.8, 0.5), (0.3, 1.4), (1.0, 0.2)])
def test_group_velocity_matches_dense_scan(delta, h):
    assert max_group_velocity(ModelParams(10, delta), h) == pytest.approx(_analytic_scan(delta, h), abs=1e-6)
