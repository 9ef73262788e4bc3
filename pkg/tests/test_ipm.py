import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from flightenergy.trajopt.ipm import IpmOptions, ScaledProblem, Status, solve_nlp

TIGHT = IpmOptions(tol=1e-8, constr_viol_tol=1e-8, compl_inf_tol=1e-8)


class HS071:
    n, m = 4, 2
    lb, ub = np.ones(4), np.full(4, 5.0)

    def objective(self, x):
        return x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2]

    def gradient(self, x):
        return np.array([x[3] * (2 * x[0] + x[1] + x[2]), x[0] * x[3], x[0] * x[3] + 1,
                         x[0] * (x[0] + x[1] + x[2])])

    def constraints(self, x):
        return np.array([np.prod(x) - 25, x @ x - 40])

    def jacobian(self, x):
        return sp.csr_matrix(np.array([np.prod(x) / x, 2 * x]))

    def hessian(self, x, lam, obj_factor=1.0):
        s = 2 * x[0] + x[1] + x[2]
        Hf = np.array([[2 * x[3], x[3], x[3], s], [x[3], 0, 0, x[0]],
                       [x[3], 0, 0, x[0]], [s, x[0], x[0], 0]])
        Hp = np.zeros((4, 4))
        for i in range(4):
            for j in range(4):
                if i != j:
                    Hp[i, j] = np.prod(x) / (x[i] * x[j])
        return sp.csr_matrix(obj_factor * Hf + lam[0] * Hp + 2 * lam[1] * np.eye(4))


class CircleRosenbrock:
    """Rosenbrock on the circle x^2 + y^2 = 2; optimum (1, 1)."""
    n, m = 2, 1
    lb, ub = np.full(2, -np.inf), np.full(2, np.inf)

    def objective(self, x):
        return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2

    def gradient(self, x):
        return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])

    def constraints(self, x):
        return np.array([x @ x - 2])

    def jacobian(self, x):
        return sp.csr_matrix(2 * x[None, :])

    def hessian(self, x, lam, obj_factor=1.0):
        H = obj_factor * np.array([[2 - 400 * x[1] + 1200 * x[0] ** 2, -400 * x[0]], [-400 * x[0], 200]])
        return sp.csr_matrix(H + 2 * lam[0] * np.eye(2))


class Unreachable:
    """x^2 + y^2 + 1 = 0 has no real solution."""
    n, m = 2, 1
    lb, ub = np.full(2, -np.inf), np.full(2, np.inf)

    def objective(self, x):
        return x @ x

    def gradient(self, x):
        return 2 * x

    def constraints(self, x):
        return np.array([x @ x + 1])

    def jacobian(self, x):
        return sp.csr_matrix(2 * x[None, :])

    def hessian(self, x, lam, obj_factor=1.0):
        return sp.csr_matrix((2 * obj_factor + 2 * lam[0]) * np.eye(2))


class ProjectionQP:
    """min |x - a|^2 s.t. sum(x) = b, 0 <= x <= u, with some coordinates fixed."""

    def __init__(self, a, b, u, fixed):
        self.a, self.b = np.asarray(a), b
        self.n, self.m = len(a), 1
        self.lb = np.zeros(self.n)
        self.ub = np.full(self.n, u)
        for i, v in fixed.items():
            self.lb[i] = self.ub[i] = v

    def objective(self, x):
        return float((x - self.a) @ (x - self.a))

    def gradient(self, x):
        return 2 * (x - self.a)

    def constraints(self, x):
        return np.array([x.sum() - self.b])

    def jacobian(self, x):
        return sp.csr_matrix(np.ones((1, self.n)))

    def hessian(self, x, lam, obj_factor=1.0):
        return sp.csr_matrix(2 * obj_factor * np.eye(self.n))


def _projection_oracle(q):
    """Clip(a - t, lb, ub) with t found by bisection so that the sum matches."""
    lo, hi = -1e3, 1e3
    for _ in range(200):
        t = 0.5 * (lo + hi)
        if np.clip(q.a - t, q.lb, q.ub).sum() > q.b:
            lo = t
        else:
            hi = t
    return np.clip(q.a - 0.5 * (lo + hi), q.lb, q.ub)


def test_hs071():
    r = solve_nlp(HS071(), [1, 5, 5, 1], TIGHT)
    assert r.status is Status.OPTIMAL
    np.testing.assert_allclose(r.x, [1.0, 4.74299964, 3.82114998, 1.37940829], atol=1e-6)
    assert r.objective == pytest.approx(17.0140173, rel=1e-8)
    assert r.constr_viol < 1e-8


def test_rosenbrock_on_circle():
    q = CircleRosenbrock()
    r = solve_nlp(q, [0.8, 1.2], TIGHT)
    assert r.status is Status.OPTIMAL
    np.testing.assert_allclose(r.x, [1.0, 1.0], atol=1e-6)
    # from the classic start the method settles in the other local minimum near (-1, 1)
    r = solve_nlp(q, [-1.2, 1.0], TIGHT)
    assert r.status is Status.OPTIMAL and abs(r.x @ r.x - 2) < 1e-8
    tangent = np.array([-r.x[1], r.x[0]])
    assert abs(q.gradient(r.x) @ tangent) < 1e-6


def test_detects_infeasibility():
    r = solve_nlp(Unreachable(), [1.0, 2.0])
    assert r.status is Status.INFEASIBLE


def test_scaling_is_transparent():
    base = HS071()
    sp_ = ScaledProblem(base, np.array([1.0, 2.0, 4.0, 0.5]), np.array([0.1, 10.0]), 3.0)
    r = solve_nlp(sp_, sp_.to_scaled(np.array([1.0, 5, 5, 1])), TIGHT)
    assert r.status is Status.OPTIMAL
    np.testing.assert_allclose(sp_.to_unscaled(r.x), [1.0, 4.74299964, 3.82114998, 1.37940829], atol=1e-6)


def test_max_iter():
    r = solve_nlp(CircleRosenbrock(), [-1.2, 1.0], IpmOptions(max_iter=2))
    assert r.status is Status.MAX_ITER and r.iterations == 2


@settings(max_examples=40, deadline=None)
@given(a=st.lists(st.floats(-2, 3), min_size=3, max_size=8), frac=st.floats(0.1, 0.9),
       fix=st.booleans())
def test_projection_matches_oracle(a, frac, fix):
    n, u = len(a), 1.5
    fixed = {0: 0.7} if fix else {}
    q = ProjectionQP(a, frac * u * n, u, fixed)
    r = solve_nlp(q, np.full(n, 0.5), TIGHT)
    if not q.lb.sum() + 1e-3 < q.b < q.ub.sum() - 1e-3:
        if q.b > q.ub.sum() + 1e-3:
            assert r.status is Status.INFEASIBLE
        return
    assert r.status is Status.OPTIMAL
    np.testing.assert_allclose(r.x, _projection_oracle(q), atol=1e-5)
    assert np.all(r.x >= q.lb - 1e-12) and np.all(r.x <= q.ub + 1e-12)
