import numpy as np
import pytest

from flightenergy.dynamics import hover_state
from flightenergy.epm import optimal_airspeed
from flightenergy.mission import (CruisePhase, LandingPhase, MissionError, MissionSpec, TakeoffPhase,
                                  compare_downwash, run_mission)
from flightenergy.trajopt import BoundaryConditions, OptStatus, Scenario, corridor_distance, takeoff
from flightenergy.dynamics import GravityMode


def test_corridor_distance():
    assert corridor_distance() == pytest.approx(5670.21)


def test_cruise_only(p):
    v_star, e_star = optimal_airspeed(p)
    rep = run_mission(MissionSpec([CruisePhase(5670.21, entry_speed=4.0)], p))
    cruise = rep.phases[0]
    assert cruise.details["airspeed_m_s"] == pytest.approx(v_star, abs=0.05)
    assert rep.total_energy == pytest.approx(e_star * 5670.21, rel=1e-4)
    assert rep.total_energy == pytest.approx(42.17 * 5670.21, rel=0.05)
    assert rep.energy_per_meter == pytest.approx(cruise.details["epm_J_m"])
    assert cruise.details["transient_energy_J"] > 0
    d = rep.as_dict()
    assert d["total_energy_J"] == sum(ph["energy_J"] for ph in d["phases"])


def test_validation(p):
    with pytest.raises(ValueError, match="at least one"):
        MissionSpec([], p)
    with pytest.raises(ValueError, match="positive"):
        MissionSpec([CruisePhase(0.0, entry_speed=5.0)], p)
    with pytest.raises(ValueError, match="entry_speed"):
        MissionSpec([CruisePhase(100.0)], p)
    with pytest.raises(ValueError, match="does not match"):
        MissionSpec([TakeoffPhase(takeoff()), CruisePhase(100.0, entry_speed=5.0)], p)
    MissionSpec([TakeoffPhase(takeoff()), CruisePhase(100.0, entry_speed=11.0)], p)


def _hop(p, z1, t_f):
    bc = BoundaryConditions(hover_state(p, (0, 0, 5)), hover_state(p, (0, 0, z1)), t_f)
    return Scenario("hop", bc, GravityMode.standard())


def test_phases_compose(p):
    trajs = {}
    spec = MissionSpec([LandingPhase(_hop(p, 8.0, 4.0), nodes=41),
                        CruisePhase(500.0, entry_speed=6.0)], p)
    rep = run_mission(spec, trajectories=trajs)
    assert [ph.name for ph in rep.phases] == ["landing", "cruise"]
    assert rep.total_energy == pytest.approx(sum(ph.energy for ph in rep.phases))
    assert rep.phases[0].distance == pytest.approx(3.0, rel=0.05)
    assert "landing" in trajs and all(ph.energy >= 0 for ph in rep.phases)


def test_failing_phase_is_tagged(p):
    spec = MissionSpec([TakeoffPhase(_hop(p, 65.0, 2.0), nodes=21)], p)
    with pytest.raises(MissionError, match="takeoff") as info:
        run_mission(spec)
    assert info.value.status is OptStatus.INFEASIBLE


def test_compare_downwash(p):
    v = np.array([0.5, 3.0, 10.0, 20.0])
    rows = compare_downwash(v, p, glauert_v_min=1.0)
    assert rows.shape == (4, 7)
    assert np.isnan(rows[0, 3]) and np.isnan(rows[0, 6]) and np.all(np.isfinite(rows[1:]))
    r3, r20 = rows[1], rows[3]
    assert abs(r3[4] - r3[5]) < abs(r3[4] - r3[6])
    assert abs(r20[4] - r20[6]) < abs(r20[4] - r20[5])
