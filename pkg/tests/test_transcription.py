import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flightenergy.dynamics import GravityMode, N_STATES, hover_state
from flightenergy.trajopt import (ANGLE_LIMIT, BoundaryConditions, InitStrategy, initial_guess, landing,
                                  takeoff, transcribe)
from flightenergy.trajopt.scenarios import LANDING_TARGET


@pytest.fixture(scope="module")
def small(p):
    bc = BoundaryConditions(hover_state(p, (0, 0, 5)), hover_state(p, (3, 0, 7)), 4.0)
    return transcribe(bc, GravityMode.standard(), p, 12)


@pytest.fixture(scope="module")
def small_landing(p):
    return landing(6.0).problem(p, 12)


def _random_point(nlp, rng):
    lo = np.where(np.isfinite(nlp.lb), nlp.lb, -20.0)
    hi = np.where(np.isfinite(nlp.ub), nlp.ub, 20.0)
    z = rng.uniform(lo, hi)
    X, U = nlp.unpack(z)
    U[:] = rng.uniform(-300, 300, U.shape)
    # v|v| has no second derivative at v = 0, where the boundary nodes sit
    X[:, 3:6] += np.where(X[:, 3:6] == 0, 0.5, 0.0)
    return nlp.pack(X, U)


def test_layout(p):
    nlp = landing(22.0).problem(p, 500)
    assert nlp.n == 10_000 and nlp.m == 499 * 16
    assert nlp.jacobian(initial_guess(nlp.bc, nlp)).shape == (nlp.m, nlp.n)


def test_paper_boundary_values():
    sc = takeoff(22.0)
    expect0 = np.zeros(16)
    expect0[12:] = 912.32
    np.testing.assert_array_equal(sc.bc.x0, expect0)
    expectf = np.array([200, 0, 200, 11, 0, 0, 0, 0.3, 0, 0, 0, 0, 1172.3, 1172.3, 1172.3, 1172.3])
    np.testing.assert_array_equal(sc.bc.xf, expectf)
    assert not sc.mode.incentivized
    ld = landing(22.0)
    assert ld.bc.xf[0] == 6070.21 and np.all(ld.bc.xf[1:] == 0)
    assert ld.mode.incentivized and ld.mode.target == LANDING_TARGET and ld.mode.k_decay == 3.0
    assert landing(22.0, incentivized=False).bc.free_names == ("omega1", "omega2", "omega3", "omega4")


def test_bounds(p, small):
    X_lb, _ = small.unpack(small.lb)
    X_ub, _ = small.unpack(small.ub)
    inner = slice(1, -1)
    assert np.all(X_lb[inner, 12:] == 0) and np.all(X_ub[inner, 12:] == p.omega_max)
    assert np.all(X_lb[inner, 2] == 0)
    assert np.all(X_ub[inner, 6:8] == pytest.approx(math.pi / 10)) and ANGLE_LIMIT == pytest.approx(math.pi / 10)
    assert np.all(np.isinf(X_ub[inner, 8]))  # yaw is free
    np.testing.assert_array_equal(X_lb[0], small.bc.x0)
    np.testing.assert_array_equal(X_ub[-1], small.bc.xf)


def test_initial_guess(p, small):
    z = initial_guess(small.bc, small, "linear-interp")
    X, U = small.unpack(z)
    np.testing.assert_array_equal(X[0], small.bc.x0)
    np.testing.assert_array_equal(X[-1], small.bc.xf)
    assert np.all(U == 0)
    assert np.all(z >= small.lb) and np.all(z <= small.ub)
    zh = initial_guess(small.bc, small, InitStrategy.HOVER_HOLD)
    assert np.all(small.unpack(zh)[0][:-1] == small.bc.x0)


def test_hover_hold_is_feasible(p):
    s = hover_state(p, (1, 2, 10))
    nlp = transcribe(BoundaryConditions(s, s, 5.0), GravityMode.standard(), p, 20)
    z = initial_guess(nlp.bc, nlp, "hover-hold")
    assert np.max(np.abs(nlp.constraints(z))) < 1e-10


def test_free_components_are_unbounded(p):
    ld = landing(10.0, incentivized=False).problem(p, 12)
    X_lb, _ = ld.unpack(ld.lb)
    X_ub, _ = ld.unpack(ld.ub)
    assert X_lb[-1, 12] == 0 and X_ub[-1, 12] == p.omega_max


def test_incentive_with_moving_target_warns(p):
    bc = BoundaryConditions(np.zeros(16), np.r_[1, 0, 1, 2.0, np.zeros(12)], 5.0)
    with pytest.warns(UserWarning, match="velocity"):
        transcribe(bc, GravityMode.landing((1, 0, 1)), p, 12)


def test_invalid(p):
    with pytest.raises(ValueError):
        BoundaryConditions(np.zeros(16), np.zeros(16), 0.0)
    with pytest.raises(ValueError):
        BoundaryConditions(np.full(16, np.nan), np.zeros(16), 1.0)
    with pytest.raises(ValueError):
        BoundaryConditions.from_states(np.zeros(16), np.zeros(16), 1.0, free=("bogus",))
    with pytest.raises(ValueError):
        transcribe(BoundaryConditions(np.zeros(16), np.zeros(16), 1.0), GravityMode.standard(), p, 5)


def test_defects_match_definition(p, small_landing):
    nlp = small_landing
    z = _random_point(nlp, np.random.default_rng(1))
    X, U = nlp.unpack(z)
    from flightenergy.dynamics import derivative
    F = derivative(X, U, nlp.mode, p)
    d = X[1:] - X[:-1] - 0.5 * nlp.h * (F[1:] + F[:-1])
    np.testing.assert_allclose(nlp.constraints(z), d.ravel(), rtol=1e-12, atol=1e-9)


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@pytest.mark.parametrize("which", ["small", "small_landing"])
def test_derivatives_match_finite_differences(which, request):
    nlp = request.getfixturevalue(which)
    rng = np.random.default_rng(7)
    z = _random_point(nlp, rng)
    scale = nlp.variable_scale()
    eps = 1e-6 * scale
    lam = rng.standard_normal(nlp.m)
    g = nlp.gradient(z)
    J = nlp.jacobian(z).toarray()
    H = nlp.hessian(z, lam, 1.0).toarray()
    g_fd = np.empty(nlp.n)
    J_fd = np.empty((nlp.m, nlp.n))
    H_fd = np.empty((nlp.n, nlp.n))
    for i in range(nlp.n):
        e = np.zeros(nlp.n)
        e[i] = eps[i]
        g_fd[i] = (nlp.objective(z + e) - nlp.objective(z - e)) / (2 * eps[i])
        J_fd[:, i] = (nlp.constraints(z + e) - nlp.constraints(z - e)) / (2 * eps[i])
        lag = lambda x: nlp.gradient(x) + nlp.jacobian(x).T @ lam  # noqa: E731
        H_fd[:, i] = (lag(z + e) - lag(z - e)) / (2 * eps[i])
    assert _rel(g, g_fd) < 1e-5
    assert _rel(J, J_fd) < 1e-5
    assert _rel(H, H_fd) < 1e-5
    np.testing.assert_allclose(H, H.T, atol=1e-9 * np.abs(H).max())


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_gradient_property(small, seed):
    z = _random_point(small, np.random.default_rng(seed))
    i = int(np.random.default_rng(seed + 1).integers(small.n))
    h = 1e-6 * small.variable_scale()[i]
    e = np.zeros(small.n)
    e[i] = h
    fd = (small.objective(z + e) - small.objective(z - e)) / (2 * h)
    assert small.gradient(z)[i] == pytest.approx(fd, rel=1e-5, abs=1e-8)
