"""Solve collocation problems and sweep the horizon length."""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import multiprocessing as mp
import numpy as np

from ..dynamics import GravityMode, Trajectory
from ..motor_energy import trajectory_energy
from ..params import DroneParams
from .ipm import IpmOptions, ScaledProblem, Status, solve_nlp
from .transcription import BoundaryConditions, InitStrategy, NlpProblem, initial_guess, transcribe

__all__ = [
    "OptStatus",
    "OptResult",
    "SweepRow",
    "solve",
    "tf_sweep",
    "touchdown",
]

log = logging.getLogger(__name__)


class OptStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"
    FAILED = "failed"


_STATUS = {
    Status.OPTIMAL: OptStatus.OPTIMAL,
    Status.MAX_ITER: OptStatus.MAX_ITER,
    Status.INFEASIBLE: OptStatus.INFEASIBLE,
    Status.FAILED: OptStatus.FAILED,
}


@dataclass
class OptResult:
    trajectory: Trajectory
    energy: float
    status: OptStatus
    iterations: int
    constr_viol: float
    dual_inf: float
    compl_inf: float
    bound_viol: float
    solve_time: float
    message: str = ""
    history: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.status is OptStatus.OPTIMAL


# A custom solver receives (nlp, z0, options) and returns an ipm.IpmResult-like object.
SolverHook = Callable[[NlpProblem, np.ndarray, IpmOptions], object]


def solve(nlp: NlpProblem, init: InitStrategy | str | np.ndarray = InitStrategy.LINEAR_INTERP, *,
          tol: float = 1e-4, max_iter: int = 5000, constr_viol_tol: float = 1e-4,
          seed: int | None = None, jitter: float = 0.0, options: IpmOptions | None = None,
          solver: SolverHook | None = None) -> OptResult:
    """Minimum-energy solution of ``nlp``.

    Parameters
    ----------
    init : strategy name or explicit decision vector
    tol : scaled KKT tolerance of the interior-point method
    constr_viol_tol : bound on the unscaled defect residual at an optimal point
    seed, jitter : optional Gaussian perturbation of the initial guess, relative
        to each variable's scale; the default (no jitter) is deterministic
    solver : replacement for the built-in interior-point method, called as
        ``solver(scaled_problem, z0_scaled, options)``
    """
    if isinstance(init, np.ndarray):
        z0 = np.clip(np.asarray(init, dtype=float), nlp.lb, nlp.ub)
        if z0.shape != (nlp.n,):
            raise ValueError(f"initial vector must have {nlp.n} entries")
    else:
        z0 = initial_guess(nlp.bc, nlp, init)
    if jitter > 0:
        rng = np.random.default_rng(seed)
        z0 = np.clip(z0 + jitter * nlp.variable_scale() * rng.standard_normal(nlp.n), nlp.lb, nlp.ub)
    opts = options or IpmOptions(tol=tol, max_iter=max_iter, constr_viol_tol=constr_viol_tol)
    sp_ = ScaledProblem(nlp, nlp.variable_scale(), nlp.constraint_scale(), nlp.objective_scale())
    t_start = time.perf_counter()
    res = (solver or solve_nlp)(sp_, sp_.to_scaled(z0), opts)
    elapsed = time.perf_counter() - t_start
    z = sp_.to_unscaled(res.x)
    c = nlp.constraints(z)
    viol = float(np.max(np.abs(c)))
    status = _STATUS.get(res.status, OptStatus.FAILED)
    if status is OptStatus.OPTIMAL and viol > constr_viol_tol:
        status = OptStatus.FAILED
    traj = nlp.trajectory(z)
    energy = trajectory_energy(traj, nlp.params).total
    log.info("solve: %s after %d iterations, energy %.1f J, |c| %.2e, %.1f s",
             status.value, res.iterations, energy, viol, elapsed)
    return OptResult(traj, energy, status, res.iterations, viol, res.dual_inf, res.compl_inf,
                     nlp.max_bound_violation(z), elapsed, res.message, res.history)


def touchdown(traj: Trajectory, target, radius: float = 0.25):
    """Touchdown time and the largest later displacement from the touchdown point.

    Touchdown is the first sample after which the distance to ``target`` stays
    below ``radius``. Returns ``(None, nan)`` if that never happens.
    """
    d = np.linalg.norm(traj.position - np.asarray(target, dtype=float), axis=1)
    outside = np.flatnonzero(d >= radius)
    k = 0 if outside.size == 0 else outside[-1] + 1
    if k >= d.size:
        return None, float("nan")
    drift = np.linalg.norm(traj.position[k:] - traj.position[k], axis=1).max()
    return float(traj.t[k]), float(drift)


@dataclass(frozen=True)
class SweepRow:
    t_f: float
    mode: str
    energy: float | None
    status: OptStatus
    iterations: int

    COLUMNS = ("t_f", "mode", "energy_J", "status", "iterations")

    def as_tuple(self):
        return (self.t_f, self.mode, self.energy, self.status.value, self.iterations)


def _sweep_one(args):
    bc, mode, p, nodes, t_f, kw = args
    nlp = transcribe(bc.with_tf(t_f), mode, p, nodes, **kw.pop("transcribe", {}))
    res = solve(nlp, **kw)
    energy = res.energy if res.ok else None
    return SweepRow(float(t_f), mode.name, energy, res.status, res.iterations)


def tf_sweep(bcs: dict, p: DroneParams, tf_values: Sequence[float], *, nodes: int = 500,
             workers: int = 1, **solve_kw) -> list[SweepRow]:
    """Solve one problem per ``(t_f, mode)`` pair.

    ``bcs`` maps each :class:`GravityMode` to the boundary conditions used with
    it. Failed points are recorded with ``energy=None`` and the sweep continues.
    Rows come back ordered by ``t_f`` then mode, whatever the completion order.
    """
    jobs = [(bc, mode, p, nodes, float(t), dict(solve_kw))
            for t in sorted(tf_values) for mode, bc in bcs.items()]
    if workers > 1 and len(jobs) > 1:
        ctx = mp.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.t_f, r.mode))
