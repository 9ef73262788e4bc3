import numpy as np
import pytest

from flightenergy.dynamics import GravityMode, Trajectory, hover_state, integrate
from flightenergy.trajopt import (BoundaryConditions, IpmOptions, OptStatus, solve, tf_sweep, touchdown,
                                  transcribe)
from flightenergy.trajopt.ipm import solve_nlp


@pytest.fixture(scope="module")
def hop(p):
    bc = BoundaryConditions(hover_state(p, (0, 0, 5)), hover_state(p, (3, 0, 7)), 4.0)
    nlp = transcribe(bc, GravityMode.standard(), p, 81)
    return nlp, solve(nlp)


def resimulate(res, mode, p, substeps=10):
    """RK4 replay of the solved controls, linearly interpolated between nodes."""
    tr = res.trajectory
    h = tr.t[1] - tr.t[0]
    u = lambda t: np.array([np.interp(t, tr.t, tr.controls[:, i]) for i in range(4)])  # noqa: E731
    return integrate(tr.states[0], u, h / substeps, mode, p, t_end=tr.t[-1], t0=tr.t[0])


def test_hop_solution(p, hop):
    nlp, res = hop
    assert res.status is OptStatus.OPTIMAL and res.ok
    assert res.constr_viol < 1e-4
    X = res.trajectory.states
    tol = 1e-4
    assert np.all(X[:, 12:] >= -tol) and np.all(X[:, 12:] <= p.omega_max + tol)
    assert np.all(X[:, 2] >= -tol)
    assert np.all(np.abs(X[:, 6:8]) <= np.pi / 10 + tol)
    np.testing.assert_allclose(X[-1], nlp.bc.xf, atol=1e-9)
    # never cheaper than idling the motors for the whole horizon
    assert res.energy > 4 * 2.97 * 4.0


def test_hop_resimulation(p, hop):
    nlp, res = hop
    sim = resimulate(res, nlp.mode, p)
    assert np.linalg.norm(sim.position[-1] - res.trajectory.position[-1]) < 2.0


def test_resimulation_gap_shrinks_at_second_order(p, hop):
    nlp, res = hop
    coarse = transcribe(nlp.bc, nlp.mode, p, 41)
    gaps = []
    for prob, r in ((coarse, solve(coarse)), (nlp, res)):
        sim = resimulate(r, prob.mode, p)
        gaps.append(np.linalg.norm(sim.position[-1] - r.trajectory.position[-1]))
    assert gaps[0] / gaps[1] > 2.5


def test_deterministic(p, hop):
    nlp, res = hop
    again = solve(nlp)
    assert again.energy == res.energy and again.iterations == res.iterations


def test_jitter_is_seeded(p, hop):
    nlp, _ = hop
    a = solve(nlp, jitter=0.01, seed=4)
    b = solve(nlp, jitter=0.01, seed=4)
    assert a.ok and a.energy == b.energy


def test_too_short_horizon_is_infeasible(p):
    # 60 m up in 2 s from a hover needs far more thrust than the motors give
    bc = BoundaryConditions(hover_state(p, (0, 0, 5)), hover_state(p, (0, 0, 65)), 2.0)
    res = solve(transcribe(bc, GravityMode.standard(), p, 21))
    assert res.status is OptStatus.INFEASIBLE and not res.ok


def test_solver_hook(p, hop):
    nlp, ref = hop
    calls = []

    def hook(problem, z0, options):
        calls.append(problem.n)
        return solve_nlp(problem, z0, options)

    res = solve(nlp, solver=hook, options=IpmOptions())
    assert calls == [nlp.n] and res.energy == pytest.approx(ref.energy, rel=1e-9)


def test_unscaled_violation_downgrades_status(p, hop):
    nlp, _ = hop

    def liar(problem, z0, options):
        r = solve_nlp(problem, z0, IpmOptions(max_iter=1))
        r.status = type(r.status).OPTIMAL
        return r

    assert solve(nlp, solver=liar).status is OptStatus.FAILED


def test_sweep_order_and_failures(p):
    bc = BoundaryConditions(hover_state(p, (0, 0, 5)), hover_state(p, (0, 0, 25)), 4.0)
    modes = {GravityMode.standard(): bc}
    rows = tf_sweep(modes, p, [8.0, 2.0], nodes=21)
    assert [r.t_f for r in rows] == [2.0, 8.0]
    assert rows[0].status is OptStatus.INFEASIBLE and rows[0].energy is None
    assert rows[1].status is OptStatus.OPTIMAL and rows[1].energy > 0


def test_touchdown():
    t = np.linspace(0, 10, 11)
    s = np.zeros((11, 16))
    s[:, 2] = np.maximum(10 - 2 * t, 0)
    tr = Trajectory(t, s, np.zeros((11, 4)))
    td, drift = touchdown(tr, (0, 0, 0))
    assert td == 5.0 and drift == 0.0
    s[:, 2] = 5.0
    assert touchdown(Trajectory(t, s, np.zeros((11, 4))), (0, 0, 0))[0] is None
