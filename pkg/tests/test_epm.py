import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flightenergy.downwash import DownwashMethod, root_downwash
from flightenergy.epm import (CruiseCondition, InvalidConditionError, airspeed_grid, cruise_thrust, epm,
                              epm_curve, optimal_airspeed, range_curve)


def _epm_oracle(v, p):
    """Hand transcription of the EPM formula with Root downwash."""
    W = p.derived.weight
    drag = 0.5 * p.rho * p.derived.cda_sum * v * v
    T = math.hypot(W, drag)
    w = root_downwash(T, v, p)
    return (p.kappa * T * w / v + drag + p.kappa2 * W**1.5 / v + p.kappa3 * W**0.5 * v) / p.eta


def test_thrust(p):
    assert cruise_thrust(CruiseCondition(1e-9), p) == pytest.approx(p.derived.weight, rel=1e-12)
    drag = 0.5 * 1.225 * p.derived.cda_sum * 144
    assert cruise_thrust(CruiseCondition(12.0), p) == pytest.approx(math.hypot(25.2, drag), rel=2e-3)
    assert cruise_thrust(CruiseCondition(12.0), p) == pytest.approx(math.hypot(p.derived.weight, drag), rel=1e-12)


def test_epm_oracle(p):
    for v in (2.0, 7.5, 12.0, 21.0):
        assert epm(CruiseCondition(v), p).total == pytest.approx(_epm_oracle(v, p), rel=1e-12)


def test_optimum(p):
    v, e = optimal_airspeed(p)
    assert 11.5 <= v <= 12.5
    assert e == pytest.approx(42.17, rel=0.05)


def test_unimodal(p):
    v = airspeed_grid()
    tot = epm_curve(v, p).total
    i = int(np.argmin(tot))
    assert np.all(np.diff(tot[: i + 1]) < 0)
    assert np.all(np.diff(tot[i:]) > 0)


def test_grid_refinement(p):
    v1, _ = optimal_airspeed(p)
    v2, _ = optimal_airspeed(p, v_grid=airspeed_grid(5, 20, 0.001))
    assert abs(v1 - v2) < 0.02


def test_avionics_pushes_optimum_up(p):
    v0, _ = optimal_airspeed(p)
    v1, _ = optimal_airspeed(p.replace(p_avio=50.0))
    assert v1 >= v0
    assert epm(CruiseCondition(10.0), p).avionics == 0.0


def test_downwash_regimes(p):
    def gap(a, b, v):
        ea = epm(CruiseCondition(v, 0, a), p).total
        eb = epm(CruiseCondition(v, 0, b), p).total
        return abs(ea - eb) / ea
    assert gap("root", "hover", 20.0) > 0.10
    assert gap("root", "glauert", 20.0) < gap("root", "hover", 20.0)
    assert gap("root", "hover", 3.0) < gap("root", "glauert", 3.0)


def test_range(p):
    v, e = optimal_airspeed(p)
    grid = airspeed_grid()
    r = range_curve(p, DownwashMethod.ROOT, 1e6, grid)
    assert r[np.argmax(r[:, 1]), 0] == pytest.approx(v)
    np.testing.assert_allclose(range_curve(p, "root", 2e6, grid)[:, 1], 2 * r[:, 1])
    assert r[np.argmax(r[:, 1]), 1] == pytest.approx(1e6 / e)


def test_errors(p):
    with pytest.raises(InvalidConditionError):
        epm(CruiseCondition(0.0), p)
    with pytest.raises(ValueError):
        optimal_airspeed(p, v_grid=[])


def test_curve_matches_scalar(p):
    v = np.array([0.5, 4.0, 12.0, 24.0])
    c = epm_curve(v, p, "hover")
    for i, vv in enumerate(v):
        b = epm(CruiseCondition(vv, 0.0, "hover"), p)
        assert c.total[i] == pytest.approx(b.total, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(v=st.floats(0.05, 25.0), theta=st.floats(-0.05, 0.3), avio=st.floats(0, 100),
       method=st.sampled_from(list(DownwashMethod)))
def test_breakdown_sums(p, v, theta, avio, method):
    q = p.replace(p_avio=avio)
    b = epm(CruiseCondition(v, theta, method), q)
    parts = (b.induced + b.parasitic + b.profile + b.rotor) / q.eta + b.avionics
    assert b.total == pytest.approx(parts, rel=1e-12)
    assert min(b.induced, b.parasitic, b.profile, b.rotor, b.avionics) >= 0
