"""Trapezoidal direct collocation of the minimum-energy trajectory problem.

Decision vector: node-major ``z = [s_0, u_0, s_1, u_1, ...]`` with 16 states and
4 motor accelerations per node. Constraints are the collocation defects ::

    d_k = s_{k+1} - s_k - h/2 (f(s_k, u_k) + f(s_{k+1}, u_{k+1})),  k = 0..N-2

and boundary values enter as fixed variables (``lb == ub``). The objective is the
trapezoidal time integral of the total motor power.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..dynamics import (IDX, N_CONTROLS, N_STATES, OMEGA, STATE_NAMES, GravityMode,
                        QuadState, Trajectory, model_constants)
from ..motor_energy import power_coefficients, trapezoid_weights
from ..params import DroneParams
from ._ad import node_functions

__all__ = [
    "BoundaryConditions",
    "InitStrategy",
    "NlpProblem",
    "transcribe",
    "initial_guess",
    "ANGLE_LIMIT",
]

NZ = N_STATES + N_CONTROLS
ANGLE_LIMIT = math.pi / 10

# Typical magnitudes used to scale variables and defects.
_STATE_SCALE = np.array([10, 10, 10, 10, 10, 10, 1, 1, 1, 1, 1, 1, 1000, 1000, 1000, 1000], float)
_CONTROL_SCALE = np.full(N_CONTROLS, 10000.0)


def _as_state(v, allow_nan=False):
    a = v.to_array() if isinstance(v, QuadState) else np.asarray(v, dtype=float)
    if a.shape != (N_STATES,):
        raise ValueError(f"boundary state needs {N_STATES} components, got shape {a.shape}")
    if not allow_nan and not np.all(np.isfinite(a)):
        raise ValueError("initial state must be fully specified and finite")
    if np.any(np.isinf(a)):
        raise ValueError("boundary values must be finite (use NaN for free components)")
    return a


@dataclass(frozen=True, eq=False)
class BoundaryConditions:
    """Fixed initial state and a final state whose NaN entries are free."""

    x0: np.ndarray
    xf: np.ndarray
    t_f: float
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x0", _as_state(self.x0))
        object.__setattr__(self, "xf", _as_state(self.xf, allow_nan=True))
        if not self.t_f > self.t0:
            raise ValueError(f"t_f ({self.t_f}) must exceed t0 ({self.t0})")

    @classmethod
    def from_states(cls, x0, xf, t_f, free=(), t0=0.0) -> "BoundaryConditions":
        """Build from full states, freeing the named final components."""
        xf = _as_state(xf, allow_nan=True).copy()
        for name in free:
            if name not in IDX:
                raise ValueError(f"unknown state component {name!r}")
            xf[IDX[name]] = np.nan
        return cls(x0, xf, t_f, t0)

    @property
    def xf_fixed(self) -> np.ndarray:
        return np.isfinite(self.xf)

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(n for n, fx in zip(STATE_NAMES, self.xf_fixed) if not fx)

    def with_tf(self, t_f: float) -> "BoundaryConditions":
        return BoundaryConditions(self.x0, self.xf, t_f, self.t0)


class InitStrategy(str, enum.Enum):
    LINEAR_INTERP = "linear-interp"
    HOVER_HOLD = "hover-hold"


def _block_pattern(jac, hess, rng):
    """Structural non-zeros of the per-node Jacobian and Hessian blocks."""
    Z = rng.uniform(0.2, 1.2, size=(3, NZ)) * np.r_[np.ones(12), np.full(4, 900.0), np.ones(4)]
    MU = rng.uniform(0.5, 1.5, size=(3, N_STATES))
    jp = np.any(jac(Z) != 0, axis=0)
    hp = np.any(hess(Z, MU) != 0, axis=0)
    return jp, hp | hp.T


class NlpProblem:
    """Collocation NLP in the form consumed by :func:`flightenergy.trajopt.ipm.solve_nlp`."""

    def __init__(self, bc: BoundaryConditions, mode: GravityMode, p: DroneParams,
                 nodes: int = 500, *, z_floor: float = 0.0, angle_limit: float = ANGLE_LIMIT):
        if nodes < 10:
            raise ValueError("nodes must be at least 10")
        self.bc, self.mode, self.params = bc, mode, p
        self.nodes = N = int(nodes)
        self.t = np.linspace(bc.t0, bc.t_f, N)
        self.h = (bc.t_f - bc.t0) / (N - 1)
        self.n = N * NZ
        self.m = (N - 1) * N_STATES
        self.z_floor = float(z_floor)
        self.angle_limit = float(angle_limit)
        self.pc = power_coefficients(p)
        self.weights = trapezoid_weights(self.t)
        self._f, self._jac, self._hess = node_functions(model_constants(p, mode))
        self._bounds()
        self._structure()

    # -- layout -----------------------------------------------------------------

    def unpack(self, z):
        Z = np.asarray(z, dtype=float).reshape(self.nodes, NZ)
        return Z[:, :N_STATES], Z[:, N_STATES:]

    def pack(self, states, controls):
        return np.hstack([states, controls]).ravel()

    def trajectory(self, z) -> Trajectory:
        X, U = self.unpack(z)
        return Trajectory(self.t.copy(), X.copy(), U.copy())

    def _bounds(self):
        p, N = self.params, self.nodes
        lo = np.full((N, NZ), -np.inf)
        hi = np.full((N, NZ), np.inf)
        lo[:, IDX["z"]] = self.z_floor
        for name in ("phi", "theta"):
            lo[:, IDX[name]] = -self.angle_limit
            hi[:, IDX[name]] = self.angle_limit
        lo[:, OMEGA] = 0.0
        hi[:, OMEGA] = p.omega_max
        for row, vals, mask in ((0, self.bc.x0, np.ones(N_STATES, bool)),
                                (N - 1, self.bc.xf, self.bc.xf_fixed)):
            out = mask & ((vals < lo[row, :N_STATES] - 1e-12) | (vals > hi[row, :N_STATES] + 1e-12))
            for i in np.flatnonzero(out):
                warnings.warn(f"boundary value {STATE_NAMES[i]}={vals[i]:g} lies outside its "
                              "path bound; the fixed value takes precedence", stacklevel=3)
            lo[row, :N_STATES] = np.where(mask, vals, lo[row, :N_STATES])
            hi[row, :N_STATES] = np.where(mask, vals, hi[row, :N_STATES])
        self.lb = lo.ravel()
        self.ub = hi.ravel()
        if self.mode.incentivized:
            v_f = self.bc.xf[3:6]
            if np.any(np.isfinite(v_f) & (np.abs(np.nan_to_num(v_f)) > 0)):
                warnings.warn("the landing incentive assumes zero final velocity; "
                              "a nonzero fixed final velocity was given", stacklevel=3)

    def _structure(self):
        N = self.nodes
        jp, hp = _block_pattern(self._jac, self._hess, np.random.default_rng(0))
        eye = np.zeros((N_STATES, NZ), bool)
        eye[:, :N_STATES] = np.eye(N_STATES, dtype=bool)
        self._jp = jp | eye
        r, c = np.nonzero(self._jp)
        K = np.arange(N - 1)
        rows_a = (K[:, None] * N_STATES + r[None, :])
        cols_a = (K[:, None] * NZ + c[None, :])
        cols_b = cols_a + NZ
        self._jrows = np.concatenate([rows_a.ravel(), rows_a.ravel()])
        self._jcols = np.concatenate([cols_a.ravel(), cols_b.ravel()])
        self._jr, self._jc = r, c
        hp = hp.copy()
        idx_obj = np.r_[np.arange(12, 16), np.arange(16, 20)]
        hp[idx_obj, idx_obj] = True
        hr, hc = np.nonzero(hp)
        J = np.arange(N)
        self._hrows = (J[:, None] * NZ + hr[None, :]).ravel()
        self._hcols = (J[:, None] * NZ + hc[None, :]).ravel()
        self._hr, self._hc = hr, hc

    # -- scaling ------------------------------------------------------------------

    def variable_scale(self) -> np.ndarray:
        return np.tile(np.r_[_STATE_SCALE, _CONTROL_SCALE], self.nodes)

    def constraint_scale(self) -> np.ndarray:
        return np.tile(1.0 / _STATE_SCALE, self.nodes - 1)

    def objective_scale(self) -> float:
        return 1e-4

    # -- NLP callbacks --------------------------------------------------------

    def objective(self, z) -> float:
        X, U = self.unpack(z)
        c = self.pc
        w = X[:, OMEGA]
        P = (((c.c4 * w + c.c3) * w + c.c2) * w + c.c1) * w + c.c0 + c.c_acc * U**2
        return float(self.weights @ P.sum(axis=1))

    def gradient(self, z) -> np.ndarray:
        X, U = self.unpack(z)
        c = self.pc
        w = X[:, OMEGA]
        G = np.zeros((self.nodes, NZ))
        G[:, OMEGA] = ((4 * c.c4 * w + 3 * c.c3) * w + 2 * c.c2) * w + c.c1
        G[:, N_STATES:] = 2 * c.c_acc * U
        return (G * self.weights[:, None]).ravel()

    def constraints(self, z) -> np.ndarray:
        X, U = self.unpack(z)
        F = self._f(np.hstack([X, U]))
        D = X[1:] - X[:-1] - 0.5 * self.h * (F[1:] + F[:-1])
        return D.ravel()

    def jacobian(self, z) -> sp.csr_matrix:
        Z = np.asarray(z, dtype=float).reshape(self.nodes, NZ)
        Jf = self._jac(Z)[:, self._jr, self._jc]  # (N, nnz_block)
        ident = (self._jc == self._jr).astype(float)
        A = -ident[None, :] - 0.5 * self.h * Jf[:-1]
        B = ident[None, :] - 0.5 * self.h * Jf[1:]
        vals = np.concatenate([A.ravel(), B.ravel()])
        return sp.csr_matrix((vals, (self._jrows, self._jcols)), shape=(self.m, self.n))

    def hessian(self, z, lam, obj_factor=1.0) -> sp.csr_matrix:
        Z = np.asarray(z, dtype=float).reshape(self.nodes, NZ)
        L = np.asarray(lam, dtype=float).reshape(self.nodes - 1, N_STATES)
        MU = np.zeros((self.nodes, N_STATES))
        MU[:-1] += L
        MU[1:] += L
        MU *= -0.5 * self.h
        Hb = self._hess(Z, MU)
        c = self.pc
        w = Z[:, 12:16]
        d2 = (12 * c.c4 * w + 6 * c.c3) * w + 2 * c.c2
        scale = obj_factor * self.weights[:, None]
        for i in range(4):
            Hb[:, 12 + i, 12 + i] += scale[:, 0] * d2[:, i]
            Hb[:, 16 + i, 16 + i] += scale[:, 0] * 2 * c.c_acc
        vals = Hb[:, self._hr, self._hc].ravel()
        return sp.csr_matrix((vals, (self._hrows, self._hcols)), shape=(self.n, self.n))

    def max_bound_violation(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return float(max(np.max(self.lb - z, initial=0.0), np.max(z - self.ub, initial=0.0)))


def transcribe(bc: BoundaryConditions, mode: GravityMode, p: DroneParams, nodes: int = 500,
               **kwargs) -> NlpProblem:
    """Collocation NLP with ``nodes * 20`` variables; see :class:`NlpProblem`."""
    return NlpProblem(bc, mode, p, nodes, **kwargs)


def initial_guess(bc: BoundaryConditions, nlp: NlpProblem,
                  strategy: InitStrategy | str = InitStrategy.LINEAR_INTERP) -> np.ndarray:
    """Starting point for :func:`flightenergy.trajopt.solve`, clamped to the bounds.

    ``linear-interp`` interpolates every fixed boundary component, holds free
    components at their initial value and puts motors at hover speed on interior
    nodes; ``hover-hold`` replicates ``x0``. Controls start at zero.
    """
    strategy = InitStrategy(strategy)
    N = nlp.nodes
    if strategy is InitStrategy.LINEAR_INTERP:
        s = np.linspace(0.0, 1.0, N)[:, None]
        xf = np.where(bc.xf_fixed, bc.xf, bc.x0)
        X = (1 - s) * bc.x0 + s * xf
        X[1:-1, OMEGA] = nlp.params.derived.omega_hover
    else:
        X = np.tile(bc.x0, (N, 1))
    z = nlp.pack(X, np.zeros((N, N_CONTROLS)))
    return np.clip(z, nlp.lb, nlp.ub)
