import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from confhess import numerics as nm


def test_fd_gradient_of_quadratic():
    q = np.array([[2.0, 0.5], [0.5, 1.0]])
    x = np.array([0.3, -1.2])
    g = nm.fd_gradient(lambda y: 0.5 * y @ q @ y, x)
    assert np.allclose(g, q @ x, atol=1e-8)


def test_fd_hessian_is_symmetric_and_accurate():
    x = np.array([0.2, 0.7, -0.4])
    h = nm.fd_hessian(lambda y: math.exp(y[0]) * y[1] + y[2] ** 3, x)
    expect = np.array([[math.exp(0.2) * 0.7, math.exp(0.2), 0],
                       [math.exp(0.2), 0, 0],
                       [0, 0, 6 * -0.4]])
    assert np.array_equal(h, h.T)
    assert np.allclose(h, expect, atol=1e-6)


def test_fd_rejects_non_finite_stencil():
    with pytest.raises(nm.NumericalError):
        nm.fd_gradient(lambda y: 1.0 / y[0] if y[0] > 0 else math.nan, np.array([0.0]))


def test_sym_eigs_diagonal_is_sorted_diagonal():
    vals, vecs = nm.sym_eigs(np.diag([3.0, 1.0, 2.0]))
    assert list(vals) == [3.0, 2.0, 1.0]
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [0, 2, 1]])


def test_sym_eigs_rejects_asymmetric():
    with pytest.raises(ValueError):
        nm.sym_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**31 - 1))
def test_sym_eigs_matches_lapack(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    vals, vecs = nm.sym_eigs(a)
    assert np.allclose(vals, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-10 * (1 + np.abs(a).max()))
    assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-10)
    assert np.allclose(a @ vecs, vecs * vals, atol=1e-9 * (1 + np.abs(a).max()))


def test_bracketed_root_sqrt2():
    assert abs(nm.bracketed_root(lambda x: x * x - 2, 1.0, 2.0) - math.sqrt(2)) <= 1e-12


def test_bracketed_root_needs_sign_change():
    with pytest.raises(ValueError):
        nm.bracketed_root(lambda x: x * x + 1, -1.0, 1.0)


def test_rk45_exponential_and_dense_output():
    traj = nm.rk45(lambda t, y: [y[0]], 0.0, 2.0, [1.0])
    assert abs(traj.y[-1][0] - math.exp(2.0)) <= 1e-11
    assert abs(traj.sol(1.3)[0] - math.exp(1.3)) <= 1e-9


def test_rk45_event_stops_integration():
    traj = nm.rk45(lambda t, y: [1.0], 0.0, 10.0, [0.0], event=lambda t, y: y[0] - 3.0)
    assert traj.event_time == pytest.approx(3.0, abs=1e-10)
    assert traj.status == "event"
    assert traj.event_state[0] == pytest.approx(3.0, abs=1e-10)


def test_rk45_harmonic_oscillator_energy():
    traj = nm.rk45(lambda t, y: [y[1], -y[0]], 0.0, 50.0, [1.0, 0.0])
    energy = [a * a + b * b for a, b in traj.y]
    assert max(abs(e - 1.0) for e in energy) <= 1e-9


def test_sphere_points_are_unit_and_seeded():
    p = nm.sphere_points(4, 100, seed=3)
    assert p.shape == (100, 4)
    assert np.allclose(np.linalg.norm(p, axis=1), 1.0)
    assert np.array_equal(p, nm.sphere_points(4, 100, seed=3))


def test_tolerance_profile_from_env():
    prof = nm.ToleranceProfile.from_env({nm.TOLERANCE_ENV: '{"ode_rtol": 1e-9}'})
    assert prof.ode_rtol == 1e-9
    assert prof.ode_atol == nm.ToleranceProfile().ode_atol
    with pytest.raises(ValueError):
        nm.ToleranceProfile.from_env({nm.TOLERANCE_ENV: '{"bogus": 1}'})
    with pytest.raises(ValueError):
        nm.ToleranceProfile.from_env({nm.TOLERANCE_ENV: '{"ode_rtol": -1}'})


def test_use_tolerances_round_trip():
    new = nm.ToleranceProfile(boundary_tol=1e-4)
    old = nm.use_tolerances(new)
    try:
        assert nm.active_tolerances() is new
    finally:
        nm.use_tolerances(old)
    assert nm.active_tolerances() is old
