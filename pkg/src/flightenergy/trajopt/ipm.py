"""Sparse primal-dual interior-point NLP solver with a filter line search.

Solves ::

    min f(x)   s.t.   c(x) = 0,   lb <= x <= ub

following the barrier / filter line-search scheme of Waechter & Biegler
(Math. Prog. 106, 2006): monotone barrier updates, fraction-to-boundary rule,
second-order corrections and an elastic feasibility-restoration phase.

Two departures from that scheme:

* ``scipy.sparse.linalg.splu`` reports no inertia. The KKT matrix with a
  ``-delta I`` lower block has inertia ``(n, m, 0)`` exactly when
  ``H + J^T J / delta`` is positive definite, so the Hessian regularisation is
  driven by a sparse Cholesky attempt on that matrix (CHOLMOD via cvxopt).
* Variables with ``lb == ub`` are removed from the iteration entirely.

The problem object must provide ``n``, ``m``, ``lb``, ``ub`` and the callables
``objective(x)``, ``gradient(x)``, ``constraints(x)``, ``jacobian(x)``
(sparse, ``m x n``) and ``hessian(x, lam, obj_factor)`` (sparse, full
symmetric ``n x n`` Hessian of ``obj_factor * f + lam @ c``).
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import cvxopt
from cvxopt import cholmod

__all__ = ["Status", "IpmOptions", "IpmResult", "ScaledProblem", "solve_nlp"]

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"
    FAILED = "failed"
    RESTORED = "restored"  # internal: restoration phase handed back a point


@dataclass
class IpmOptions:
    tol: float = 1e-4
    max_iter: int = 5000
    constr_viol_tol: float = 1e-4
    compl_inf_tol: float = 1e-4
    dual_inf_tol: float = 1.0
    mu_init: float = 0.1
    bound_push: float = 1e-2
    bound_frac: float = 1e-2
    kappa_eps: float = 10.0
    kappa_mu: float = 0.2
    theta_mu: float = 1.5
    tau_min: float = 0.99
    s_max: float = 100.0
    kappa_sigma: float = 1e10
    max_soc: int = 4
    inertia_delta: float = 1e-6
    time_limit: float | None = None
    verbose: bool = False


@dataclass
class IpmResult:
    x: np.ndarray
    lam: np.ndarray
    z_lower: np.ndarray
    z_upper: np.ndarray
    status: Status
    iterations: int
    objective: float
    constr_viol: float
    dual_inf: float
    compl_inf: float
    message: str = ""
    history: list = field(default_factory=list)


class ScaledProblem:
    """Diagonal scaling wrapper: ``x = x_scale * xs``, ``cs = c_scale * c``, ``fs = obj_scale * f``."""

    def __init__(self, problem, x_scale=None, c_scale=None, obj_scale: float = 1.0):
        self.p = problem
        self.n, self.m = problem.n, problem.m
        self.dx = np.ones(self.n) if x_scale is None else np.asarray(x_scale, float)
        self.dc = np.ones(self.m) if c_scale is None else np.asarray(c_scale, float)
        self.sf = float(obj_scale)
        self.lb = problem.lb / self.dx
        self.ub = problem.ub / self.dx
        self._Dx = sp.diags(self.dx)
        self._Dc = sp.diags(self.dc)

    def to_unscaled(self, xs):
        return xs * self.dx

    def to_scaled(self, x):
        return np.asarray(x, float) / self.dx

    def objective(self, xs):
        return self.sf * self.p.objective(xs * self.dx)

    def gradient(self, xs):
        return self.sf * self.p.gradient(xs * self.dx) * self.dx

    def constraints(self, xs):
        return self.dc * self.p.constraints(xs * self.dx)

    def jacobian(self, xs):
        return (self._Dc @ self.p.jacobian(xs * self.dx) @ self._Dx).tocsr()

    def hessian(self, xs, lam, obj_factor=1.0):
        H = self.p.hessian(xs * self.dx, lam * self.dc, obj_factor * self.sf)
        return (self._Dx @ H @ self._Dx).tocsc()

    def unscale_constraints(self, c):
        return c / self.dc

    def unscale_multipliers(self, lam, zl, zu):
        return lam * self.dc / self.sf, zl / self.dx / self.sf, zu / self.dx / self.sf


class _Singular(Exception):
    pass


def _positive_definite(S) -> bool:
    """Sparse Cholesky attempt on the lower triangle of symmetric ``S``."""
    L = sp.tril(S, format="coo")
    A = cvxopt.spmatrix(L.data, L.row.astype(int), L.col.astype(int), L.shape)
    try:
        F = cholmod.symbolic(A)
        cholmod.numeric(A, F)
    except ArithmeticError:
        return False
    return True


def _factorize(K):
    try:
        lu = spla.splu(K, permc_spec="COLAMD")
    except RuntimeError as exc:  # "Factor is exactly singular"
        raise _Singular(str(exc)) from None
    return lu


class _Reduced:
    """View of a problem restricted to its non-fixed variables."""

    def __init__(self, problem):
        self.p = problem
        lb, ub = np.asarray(problem.lb, float), np.asarray(problem.ub, float)
        if np.any(lb > ub):
            raise ValueError("lower bound exceeds upper bound")
        self.free = np.flatnonzero(lb < ub)
        self.fixed = np.flatnonzero(lb == ub)
        self.x_full = np.where(lb == ub, lb, 0.0)
        self.lb = lb[self.free]
        self.ub = ub[self.free]
        self.n = self.free.size
        self.m = problem.m
        self.unscale_constraints = getattr(problem, "unscale_constraints", lambda c: c)

    def full(self, x):
        out = self.x_full.copy()
        out[self.free] = x
        return out

    def objective(self, x):
        return self.p.objective(self.full(x))

    def gradient(self, x):
        return self.p.gradient(self.full(x))[self.free]

    def constraints(self, x):
        return self.p.constraints(self.full(x))

    def jacobian(self, x):
        return sp.csc_matrix(self.p.jacobian(self.full(x)))[:, self.free]

    def hessian(self, x, lam, obj_factor=1.0):
        H = sp.csc_matrix(self.p.hessian(self.full(x), lam, obj_factor))
        return H[:, self.free].tocsr()[self.free, :]


class _Restoration:
    """Elastic feasibility problem used by the restoration phase.

    Variables ``(x, p, n)`` with ``p, n >= 0``::

        min rho * sum(p + n) + zeta/2 * ||D (x - x_ref)||^2   s.t.  c(x) - p + n = 0
    """

    def __init__(self, red: _Reduced, x_ref, zeta, rho=1000.0):
        self.red = red
        self.nx, self.m = red.n, red.m
        self.n = self.nx + 2 * self.m
        self.x_ref = x_ref
        self.zeta = zeta
        self.rho = rho
        self.dr2 = np.minimum(1.0, 1.0 / np.maximum(np.abs(x_ref), 1e-12)) ** 2
        self.lb = np.concatenate([red.lb, np.zeros(2 * self.m)])
        self.ub = np.concatenate([red.ub, np.full(2 * self.m, np.inf)])
        I = sp.identity(self.m, format="csr")
        self._pn = sp.hstack([-I, I]).tocsr()

    def split(self, v):
        return v[: self.nx], v[self.nx: self.nx + self.m], v[self.nx + self.m:]

    def objective(self, v):
        x, p, n = self.split(v)
        dx = x - self.x_ref
        return self.rho * (p.sum() + n.sum()) + 0.5 * self.zeta * np.sum(self.dr2 * dx * dx)

    def gradient(self, v):
        x, _, _ = self.split(v)
        return np.concatenate([self.zeta * self.dr2 * (x - self.x_ref),
                               np.full(2 * self.m, self.rho)])

    def constraints(self, v):
        x, p, n = self.split(v)
        return self.red.constraints(x) - p + n

    def jacobian(self, v):
        x, _, _ = self.split(v)
        return sp.hstack([self.red.jacobian(x), self._pn]).tocsc()

    def hessian(self, v, lam, obj_factor=1.0):
        x, _, _ = self.split(v)
        Hx = self.red.hessian(x, lam, 0.0) + sp.diags(obj_factor * self.zeta * self.dr2)
        return sp.block_diag([Hx, sp.csr_matrix((2 * self.m, 2 * self.m))], format="csc")

    def initial_point(self, mu):
        c = self.red.constraints(self.x_ref)
        a = (mu - self.rho * c) / (2 * self.rho)
        n = a + np.sqrt(a * a + mu * c / (2 * self.rho))
        p = c + n
        return np.concatenate([self.x_ref, p, n])


def _frac_to_boundary(v, dv, tau):
    """Largest alpha in (0, 1] with v + alpha dv >= (1 - tau) v (v > 0)."""
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return float(min(1.0, np.min(-tau * v[neg] / dv[neg])))


class _Solver:
    def __init__(self, prob, opts: IpmOptions, *, restoration_depth=0, stop_check=None,
                 mu_init=None, lam0=None):
        self.prob = prob
        self.o = opts
        self.depth = restoration_depth
        self.stop_check = stop_check
        self.mu = opts.mu_init if mu_init is None else mu_init
        self.lam0 = lam0
        self.n, self.m = prob.n, prob.m
        self.lb, self.ub = prob.lb, prob.ub
        self.hasL = np.isfinite(self.lb)
        self.hasU = np.isfinite(self.ub)
        self.iL = np.flatnonzero(self.hasL)
        self.iU = np.flatnonzero(self.hasU)
        self.nb = self.iL.size + self.iU.size
        self.delta_w_last = 0.0
        self.history = []
        self.last_alpha, self.last_reg, self.last_ls = 0.0, 0.0, 0
        self.t_start = time.monotonic()

    # -- evaluation helpers -------------------------------------------------

    def _slacks(self, x):
        return x[self.iL] - self.lb[self.iL], self.ub[self.iU] - x[self.iU]

    def _barrier(self, f, sL, sU, mu):
        return f - mu * (np.sum(np.log(sL)) + np.sum(np.log(sU)))

    def _project_initial(self, x):
        x = np.array(x, dtype=float)
        lb, ub = self.lb, self.ub
        k1, k2 = self.o.bound_push, self.o.bound_frac
        both = self.hasL & self.hasU
        pL = np.where(both, np.minimum(k1 * np.maximum(1, np.abs(lb)), k2 * (ub - lb)),
                      k1 * np.maximum(1, np.abs(lb)))
        pU = np.where(both, np.minimum(k1 * np.maximum(1, np.abs(ub)), k2 * (ub - lb)),
                      k1 * np.maximum(1, np.abs(ub)))
        with np.errstate(invalid="ignore"):
            lo = np.where(self.hasL, lb + pL, -np.inf)
            hi = np.where(self.hasU, ub - pU, np.inf)
            mid = np.where(both, 0.5 * (lb + ub), x)
        x = np.where(lo > hi, mid, np.clip(x, lo, hi))
        return x

    def _initial_multipliers(self, g, J, zL, zU):
        if self.m == 0:
            return np.zeros(0)
        if self.lam0 is not None:
            return np.array(self.lam0, dtype=float)
        rhs = np.concatenate([-(g - self._zvec(zL, zU)), np.zeros(self.m)])
        K = sp.bmat([[sp.identity(self.n), J.T], [J, None]], format="csc")
        try:
            sol = _factorize(K).solve(rhs)
        except _Singular:
            return np.zeros(self.m)
        lam = sol[self.n:]
        if not np.all(np.isfinite(lam)) or np.max(np.abs(lam)) > 1e3:
            return np.zeros(self.m)
        return lam

    def _zvec(self, zL, zU):
        z = np.zeros(self.n)
        z[self.iL] -= zL
        z[self.iU] += zU
        return z

    # -- main loop -----------------------------------------------------------

    def run(self, x0):
        o = self.o
        x = self._project_initial(x0)
        zL = np.ones(self.iL.size)
        zU = np.ones(self.iU.size)
        f, g, c, J = self._eval_all(x)
        lam = self._initial_multipliers(g, J, zL, zU)
        theta0 = np.sum(np.abs(c))
        self.theta_max = 1e4 * max(1.0, theta0)
        self.theta_min = 1e-4 * max(1.0, theta0)
        self.filter = []
        tau = max(o.tau_min, 1 - self.mu)
        it = 0
        status = Status.MAX_ITER
        msg = "iteration limit reached"
        while True:
            sL, sU = self._slacks(x)
            rd = g + J.T @ lam + self._zvec(zL, zU)
            err0, parts = self._error(rd, c, sL, sU, zL, zU, lam, 0.0)
            self._record(it, f, parts, lam, x)
            if self.depth == 0 and self._converged(err0, parts, c):
                status, msg = Status.OPTIMAL, "optimal solution found"
                break
            if self.depth > 0 and err0 <= o.tol and parts["constr"] <= o.constr_viol_tol:
                status, msg = Status.OPTIMAL, "restoration problem converged"
                break
            if it >= o.max_iter:
                break
            if o.time_limit is not None and time.monotonic() - self.t_start > o.time_limit:
                msg = "time limit reached"
                break
            # barrier update
            while True:
                err_mu, _ = self._error(rd, c, sL, sU, zL, zU, lam, self.mu)
                if err_mu > o.kappa_eps * self.mu or self.mu <= o.tol / 10:
                    break
                self.mu = max(o.tol / 10, min(o.kappa_mu * self.mu, self.mu ** o.theta_mu))
                tau = max(o.tau_min, 1 - self.mu)
                self.filter = []
            mu = self.mu
            try:
                W = self.prob.hessian(x, lam, 1.0)
                step = self._direction(x, g, c, J, W, lam, zL, zU, sL, sU, mu)
            except _Singular as exc:
                status, msg = Status.FAILED, f"KKT system could not be regularised: {exc}"
                break
            dx, dlam, dzL, dzU, lu_solve, rx = step
            a_max = min(_frac_to_boundary(sL, dx[self.iL], tau),
                        _frac_to_boundary(sU, -dx[self.iU], tau))
            a_z = min(_frac_to_boundary(zL, dzL, tau), _frac_to_boundary(zU, dzU, tau))
            accepted = self._line_search(x, f, g, c, sL, sU, dx, a_max, mu, tau, lu_solve, rx)
            if accepted is None:
                if self.depth > 0:
                    status, msg = Status.FAILED, "line search failed inside restoration"
                    break
                res = self._restore(x, c, lam, zL, zU, mu)
                if res is None:
                    status, msg = Status.INFEASIBLE, "converged to a point of local infeasibility"
                    break
                if isinstance(res, str):
                    status, msg = Status.FAILED, res
                    break
                x, lam, zL, zU = res
                f, g, c, J = self._eval_all(x)
                it += 1
                continue
            x_new, alpha, f_new, c_new = accepted
            self.last_alpha = alpha
            x = x_new
            lam = lam + alpha * dlam
            zL = zL + a_z * dzL
            zU = zU + a_z * dzU
            sL, sU = self._slacks(x)
            ks = o.kappa_sigma
            zL = np.clip(zL, mu / (ks * sL), ks * mu / sL)
            zU = np.clip(zU, mu / (ks * sU), ks * mu / sU)
            f = f_new
            g = self.prob.gradient(x)
            c = c_new
            J = self.prob.jacobian(x)
            it += 1
            if self.stop_check is not None and self.stop_check(x):
                status, msg = Status.RESTORED, "restoration succeeded"
                break
        sL, sU = self._slacks(x)
        rd = g + J.T @ lam + self._zvec(zL, zU)
        _, parts = self._error(rd, c, sL, sU, zL, zU, lam, 0.0)
        return IpmResult(x, lam, zL, zU, status, it, float(f), parts["constr"], parts["dual"],
                         parts["compl"], msg, self.history)

    def _eval_all(self, x):
        return (self.prob.objective(x), self.prob.gradient(x),
                self.prob.constraints(x), self.prob.jacobian(x))

    def _error(self, rd, c, sL, sU, zL, zU, lam, mu):
        o = self.o
        nz = zL.size + zU.size
        s_d = max(o.s_max, (np.sum(np.abs(lam)) + np.sum(zL) + np.sum(zU)) / max(1, self.m + nz)) / o.s_max
        s_c = max(o.s_max, (np.sum(zL) + np.sum(zU)) / max(1, nz)) / o.s_max
        dual = float(np.max(np.abs(rd))) if rd.size else 0.0
        constr = float(np.max(np.abs(c))) if c.size else 0.0
        compl_vals = np.concatenate([sL * zL - mu, sU * zU - mu])
        compl = float(np.max(np.abs(compl_vals))) if compl_vals.size else 0.0
        err = max(dual / s_d, constr, compl / s_c)
        return err, {"dual": dual, "constr": constr, "compl": compl, "err": err}

    def _converged(self, err0, parts, c):
        o = self.o
        if not (err0 <= o.tol and parts["dual"] <= o.dual_inf_tol
                and parts["compl"] <= o.compl_inf_tol):
            return False
        cu = self.prob.unscale_constraints(c)
        return cu.size == 0 or float(np.max(np.abs(cu))) <= o.constr_viol_tol

    def _record(self, it, f, parts, lam, x):
        rec = {"iter": it, "obj": float(f), "mu": self.mu, **parts,
               "alpha_pr": self.last_alpha, "reg": self.last_reg, "ls": self.last_ls}
        self.history.append(rec)
        if self.o.verbose:
            log.info("%s%4d  f=% .6e  inf_pr=%.2e  inf_du=%.2e  compl=%.2e  mu=%.1e  "
                     "reg=%.1e  a_pr=%.2e  ls=%d", "r" if self.depth else " ", it, f,
                     parts["constr"], parts["dual"], parts["compl"], self.mu,
                     self.last_reg, self.last_alpha, self.last_ls)

    # -- search direction -----------------------------------------------------

    def _direction(self, x, g, c, J, W, lam, zL, zU, sL, sU, mu):
        n, m = self.n, self.m
        sig = np.zeros(n)
        sig[self.iL] += zL / sL
        sig[self.iU] += zU / sU
        gbar = g.copy()
        gbar[self.iL] -= mu / sL
        gbar[self.iU] += mu / sU
        rx = gbar + J.T @ lam
        rhs = -np.concatenate([rx, c])
        base = sp.csc_matrix(W) + sp.diags(sig)
        JT = J.T.tocsc()
        JTJ = (JT @ J).tocsc()
        delta_w, delta_c = 0.0, 0.0
        tries = 0
        while True:
            tries += 1
            if tries > 60 or delta_w > 1e40:
                raise _Singular("regularisation exceeded 1e40")
            Hreg = base + sp.diags(np.full(n, delta_w)) if delta_w else base
            if not _positive_definite(Hreg + JTJ / max(delta_c, self.o.inertia_delta)):
                delta_w = self._next_delta(delta_w)
                continue
            lower = sp.diags(np.full(m, -delta_c)) if delta_c else sp.csc_matrix((m, m))
            K = sp.bmat([[Hreg, JT], [J, lower]], format="csc")
            try:
                lu = _factorize(K)
            except _Singular:
                if delta_c:
                    delta_w = self._next_delta(delta_w)
                delta_c = 1e-8 * mu ** 0.25
                continue
            sol = lu.solve(rhs)
            if not np.all(np.isfinite(sol)):
                delta_c = 1e-8 * mu ** 0.25
                delta_w = self._next_delta(delta_w)
                continue
            # one step of iterative refinement
            sol = sol + lu.solve(rhs - K @ sol)
            dx, dlam = sol[:n], sol[n:]
            break
        if delta_w > 0:
            self.delta_w_last = delta_w
        self.last_reg = delta_w
        dzL = mu / sL - zL - (zL / sL) * dx[self.iL]
        dzU = mu / sU - zU + (zU / sU) * dx[self.iU]

        def lu_solve(rhs_x, rhs_c):
            return lu.solve(-np.concatenate([rhs_x, rhs_c]))[:n]

        return dx, dlam, dzL, dzU, lu_solve, rx

    def _next_delta(self, delta_w):
        if delta_w == 0.0:
            return 1e-4 if self.delta_w_last == 0 else max(1e-20, self.delta_w_last / 3)
        return delta_w * (100.0 if self.delta_w_last == 0 else 8.0)

    # -- line search ------------------------------------------------------------

    def _acceptable_to_filter(self, theta, phi):
        if theta > self.theta_max:
            return False
        for th_j, ph_j in self.filter:
            if theta >= th_j and phi >= ph_j:
                return False
        return True

    def _line_search(self, x, f, g, c, sL, sU, dx, a_max, mu, tau, lu_solve, rx):
        gamma_theta, gamma_phi, delta = 1e-5, 1e-8, 1.0
        s_theta, s_phi, eta_phi = 1.1, 2.3, 1e-8
        theta = float(np.sum(np.abs(c)))
        phi = self._barrier(f, sL, sU, mu)
        gbar = g.copy()
        gbar[self.iL] -= mu / sL
        gbar[self.iU] += mu / sU
        gphi_d = float(gbar @ dx)
        if gphi_d < 0:
            a_min = 0.05 * min(gamma_theta, gamma_phi * theta / -gphi_d,
                               delta * theta**s_theta / (-gphi_d) ** s_phi)
        else:
            a_min = 0.05 * gamma_theta
        a_min = max(a_min, 1e-12)
        if theta == 0 and gphi_d >= 0:
            a_min = 1e-12
        alpha = a_max
        first = True
        self.last_ls = 0
        while alpha >= a_min:
            self.last_ls += 1
            xt = x + alpha * dx
            res = self._try_point(xt, theta, phi, gphi_d, alpha, mu, gamma_theta, gamma_phi,
                                  delta, s_theta, s_phi, eta_phi)
            if res is not None:
                ft, ct, f_type = res
                if not f_type:
                    self.filter.append(((1 - gamma_theta) * theta, phi - gamma_phi * theta))
                return xt, alpha, ft, ct
            if first and self.o.max_soc > 0:
                soc = self._second_order_correction(x, c, dx, alpha, theta, phi, gphi_d, mu, tau,
                                                    sL, sU, lu_solve, rx, gamma_theta, gamma_phi,
                                                    delta, s_theta, s_phi, eta_phi)
                if soc is not None:
                    return soc
            first = False
            alpha *= 0.5
        return None

    def _try_point(self, xt, theta, phi, gphi_d, alpha, mu, g_th, g_ph, delta, s_th, s_ph, eta):
        sLt, sUt = self._slacks(xt)
        if np.any(sLt <= 0) or np.any(sUt <= 0):
            return None
        ct = self.prob.constraints(xt)
        ft = self.prob.objective(xt)
        if not (np.isfinite(ft) and np.all(np.isfinite(ct))):
            return None
        theta_t = float(np.sum(np.abs(ct)))
        phi_t = self._barrier(ft, sLt, sUt, mu)
        if not self._acceptable_to_filter(theta_t, phi_t):
            return None
        switching = gphi_d < 0 and alpha * (-gphi_d) ** s_ph > delta * theta**s_th
        if theta <= self.theta_min and switching:
            if phi_t <= phi + eta * alpha * gphi_d:
                return ft, ct, True
            return None
        if theta_t <= (1 - g_th) * theta or phi_t <= phi - g_ph * theta:
            return ft, ct, False
        return None

    def _second_order_correction(self, x, c, dx, alpha, theta, phi, gphi_d, mu, tau, sL, sU,
                                 lu_solve, rx, g_th, g_ph, delta, s_th, s_ph, eta):
        xt = x + alpha * dx
        ct = self.prob.constraints(xt)
        theta_t = float(np.sum(np.abs(ct)))
        if theta_t < theta:
            return None
        c_soc = alpha * c + ct
        theta_old = theta_t
        for _ in range(self.o.max_soc):
            dx_soc = lu_solve(rx, c_soc)
            a_soc = min(_frac_to_boundary(sL, dx_soc[self.iL], tau),
                        _frac_to_boundary(sU, -dx_soc[self.iU], tau))
            xs = x + a_soc * dx_soc
            res = self._try_point(xs, theta, phi, gphi_d, alpha, mu, g_th, g_ph, delta,
                                  s_th, s_ph, eta)
            if res is not None:
                fs, cs, f_type = res
                if not f_type:
                    self.filter.append(((1 - g_th) * theta, phi - g_ph * theta))
                return xs, alpha, fs, cs
            cs = self.prob.constraints(xs)
            theta_s = float(np.sum(np.abs(cs)))
            if theta_s > 0.99 * theta_old:
                return None
            theta_old = theta_s
            c_soc = a_soc * c_soc + cs
        return None

    # -- restoration ---------------------------------------------------------

    def _restore(self, x, c, lam, zL, zU, mu):
        """Minimise constraint violation until the filter accepts the point.

        Returns the new primal-dual point, ``None`` for local infeasibility or a
        message string on failure.
        """
        theta_r = float(np.sum(np.abs(c)))
        f_r = self.prob.objective(x)
        sL, sU = self._slacks(x)
        phi_r = self._barrier(f_r, sL, sU, mu)
        self.filter.append(((1 - 1e-5) * theta_r, phi_r - 1e-8 * theta_r))
        mu_r = max(mu, float(np.max(np.abs(c))) if c.size else mu)
        rp = _Restoration(self.prob, x, math.sqrt(mu))
        v0 = rp.initial_point(mu_r)

        def stop(v):
            xr = v[: rp.nx]
            ct = self.prob.constraints(xr)
            th = float(np.sum(np.abs(ct)))
            if th > 0.9 * theta_r and th > self.o.constr_viol_tol:
                return False
            sLt, sUt = self._slacks(xr)
            ph = self._barrier(self.prob.objective(xr), sLt, sUt, mu)
            return self._acceptable_to_filter(th, ph)

        opts = IpmOptions(**{**self.o.__dict__, "verbose": self.o.verbose,
                             "max_iter": max(50, self.o.max_iter // 4)})
        inner = _Solver(rp, opts, restoration_depth=self.depth + 1, stop_check=stop,
                        mu_init=mu_r, lam0=np.zeros(rp.m))
        res = inner.run(v0)
        self.history.extend({**h, "restoration": True} for h in res.history)
        if res.status is Status.RESTORED:
            x_new = res.x[: rp.nx]
            zL_new = np.minimum(res.z_lower[: self.iL.size], 1e3) if res.z_lower.size else zL
            zU_new = np.minimum(res.z_upper[: self.iU.size], 1e3) if res.z_upper.size else zU
            zL_new = np.maximum(zL_new, 1e-12)
            zU_new = np.maximum(zU_new, 1e-12)
            f, g, cc, J = self._eval_all(x_new)
            lam_new = self._initial_multipliers(g, J, zL_new, zU_new)
            return x_new, lam_new, zL_new, zU_new
        _, p, nn = rp.split(res.x)
        viol = float(np.max(p + nn)) if p.size else 0.0
        if res.status is Status.OPTIMAL and viol > self.o.constr_viol_tol:
            return None
        ct = self.prob.constraints(res.x[: rp.nx])
        if float(np.max(np.abs(ct))) > self.o.constr_viol_tol and res.status is Status.OPTIMAL:
            return None
        return f"restoration phase failed ({res.status.value}: {res.message})"


def solve_nlp(problem, x0, options: IpmOptions | None = None) -> IpmResult:
    """Solve ``problem`` from ``x0``; returns the full (unreduced) solution vector."""
    opts = options or IpmOptions()
    red = _Reduced(problem)
    x0 = np.asarray(x0, dtype=float)
    res = _Solver(red, opts).run(x0[red.free])
    x_full = red.full(res.x)
    zl = np.zeros(problem.n)
    zu = np.zeros(problem.n)
    hasL = np.isfinite(red.lb)
    hasU = np.isfinite(red.ub)
    zl[red.free[hasL]] = res.z_lower
    zu[red.free[hasU]] = res.z_upper
    status = Status.FAILED if res.status is Status.RESTORED else res.status
    return IpmResult(x_full, res.lam, zl, zu, status, res.iterations, res.objective,
                     res.constr_viol, res.dual_inf, res.compl_inf, res.message, res.history)
