"""Command-line scenario runner.

``plan <study> --config FILE --out DIR [--seed N]`` reads an INI file (the
``[drone]`` section overrides parameters, one section per study holds its
settings), runs the study and writes ``DIR/<study>.csv`` plus
``DIR/<study>.json``. Outputs contain no timestamps or timings, so the same
config and seed reproduce them byte for byte.

Exit codes: 0 success, 2 configuration error, 3 infeasible optimisation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .downwash import DownwashMethod
from .dynamics import N_STATES, STATE_NAMES, CONTROL_NAMES, GravityMode, IntegrationError
from .epm import airspeed_grid, epm_curve, optimal_airspeed
from .mission import (DOWNWASH_COLUMNS, CruisePhase, LandingPhase, MissionError, MissionSpec,
                      TakeoffPhase, compare_downwash, run_mission)
from .motor_energy import trajectory_energy
from .params import DRONE_SECTION, ParamsError, default_drone, format_params, params_from_mapping, read_config
from .regulator import AirspeedPlant, RegulatorConfig, simulate
from .trajopt import (BoundaryConditions, InitStrategy, OptStatus, Scenario, corridor_distance,
                      landing, solve, takeoff, tf_sweep, touchdown)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4
STUDIES = ("epm-curve", "downwash-compare", "regulate", "optimize", "tf-sweep", "mission")

log = logging.getLogger("flightenergy.cli")


class ConfigError(ValueError):
    pass


class Section:
    """Typed, checked access to one config section; unknown keys are errors."""

    def __init__(self, cp: configparser.ConfigParser | None, name: str):
        self.name = name
        self.values = dict(cp[name]) if cp is not None and cp.has_section(name) else {}
        self._used = set()

    def _raw(self, key):
        self._used.add(key)
        return self.values.get(key)

    def float(self, key, default=None):
        raw = self._raw(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: expected a number, got {raw!r}") from None

    def int(self, key, default=None):
        v = self.float(key, None)
        if v is None:
            return default
        if v != int(v):
            raise ConfigError(f"[{self.name}] {key}: expected an integer, got {v}")
        return int(v)

    def str(self, key, default=None):
        raw = self._raw(key)
        return default if raw is None else raw.strip()

    def bool(self, key, default=False):
        raw = self._raw(key)
        if raw is None:
            return default
        low = raw.strip().lower()
        if low in ("1", "yes", "true", "on"):
            return True
        if low in ("0", "no", "false", "off"):
            return False
        raise ConfigError(f"[{self.name}] {key}: expected a boolean, got {raw!r}")

    def floats(self, key, default=None, allow_free=False):
        raw = self._raw(key)
        if raw is None:
            return default
        out = []
        for tok in raw.replace(",", " ").split():
            if allow_free and tok.lower() in ("free", "nan"):
                out.append(math.nan)
                continue
            try:
                out.append(float(tok))
            except ValueError:
                raise ConfigError(f"[{self.name}] {key}: bad number {tok!r}") from None
        return out

    def check_unused(self):
        extra = sorted(set(self.values) - self._used)
        if extra:
            raise ConfigError(f"[{self.name}]: unknown keys {extra}")


# -- output helpers -------------------------------------------------------------


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return "" if not np.isfinite(v) else repr(float(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if np.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


# -- studies --------------------------------------------------------------------


def _method(sec: Section, default="root"):
    try:
        return DownwashMethod.parse(sec.str("method", default))
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}] method: {exc}") from None


def _grid(sec: Section, v_min=0.01, v_max=25.0, step=0.01):
    try:
        return airspeed_grid(sec.float("v_min", v_min), sec.float("v_max", v_max),
                             sec.float("step", step))
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}]: {exc}") from None


def study_epm_curve(cp, p, out, seed):
    sec = Section(cp, "epm-curve")
    v = _grid(sec)
    method = _method(sec)
    theta = sec.float("theta_path", 0.0)
    sec.check_unused()
    curve = epm_curve(v, p, method, theta)
    write_csv(out / "epm-curve.csv", curve.COLUMNS, curve.rows())
    i = int(np.argmin(curve.total))
    write_json(out / "epm-curve.json", {"method": method.value, "v_star_m_s": v[i],
                                        "epm_star_J_m": curve.total[i], "points": int(v.size)})
    return EXIT_OK


def study_downwash_compare(cp, p, out, seed):
    sec = Section(cp, "downwash-compare")
    v = _grid(sec, 0.5, 25.0, 0.5)
    v_min = sec.float("glauert_v_min", 1.0)
    sec.check_unused()
    rows = compare_downwash(v, p, v_min)
    write_csv(out / "downwash-compare.csv", DOWNWASH_COLUMNS, rows)
    summary = {"glauert_v_min_m_s": v_min, "points": int(v.size)}
    for k, name in ((4, "root"), (5, "hover"), (6, "glauert")):
        col = rows[:, k]
        if np.any(np.isfinite(col)):
            i = int(np.nanargmin(col))
            summary[name] = {"v_star_m_s": rows[i, 0], "epm_star_J_m": col[i]}
    write_json(out / "downwash-compare.json", summary)
    return EXIT_OK


def _regulator(sec: Section):
    d = RegulatorConfig()
    try:
        cfg = RegulatorConfig(
            kp=sec.float("kp", d.kp), ki=sec.float("ki", d.ki), kd=sec.float("kd", d.kd),
            delta_v=sec.float("delta_v", d.delta_v), dt=sec.float("dt", d.dt),
            trigger_time=sec.float("trigger_time", d.trigger_time),
            anti_windup_limit=sec.float("anti_windup_limit", None),
            v_cmd_min=sec.float("v_cmd_min", d.v_cmd_min), v_cmd_max=sec.float("v_cmd_max", d.v_cmd_max))
        plant = AirspeedPlant(sec.float("tau", 0.5), sec.float("accel_limit", None))
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}]: {exc}") from None
    return cfg, plant


def study_regulate(cp, p, out, seed):
    sec = Section(cp, "regulate")
    cfg, plant = _regulator(sec)
    v0 = sec.float("v0", 4.0)
    t_end = sec.float("t_end", 60.0)
    noise = sec.float("noise_std", 0.0)
    method = _method(sec)
    sec.check_unused()
    try:
        trace = simulate(cfg, plant, v0, t_end, p, method, noise_std=noise, seed=seed)
    except ValueError as exc:
        raise ConfigError(f"[regulate]: {exc}") from None
    write_csv(out / "regulate.csv", trace.COLUMNS, trace.rows())
    v_ss, e_ss = trace.steady_state()
    v_star, e_star = optimal_airspeed(p, method)
    write_json(out / "regulate.json", {"steady_airspeed_m_s": v_ss, "steady_epm_J_m": e_ss,
                                       "grid_v_star_m_s": v_star, "grid_epm_star_J_m": e_star,
                                       "seed": seed})
    return EXIT_OK


def _mode(sec: Section, default: GravityMode, xf):
    name = sec.str("mode", default.name).lower()
    if name == "standard":
        return GravityMode.standard()
    if name != "incentivized":
        raise ConfigError(f"[{sec.name}] mode: expected standard or incentivized, got {name!r}")
    target = sec.floats("target", None)
    if target is None:
        target = default.target if default.incentivized else tuple(xf[0:3])
    if len(target) != 3 or not np.all(np.isfinite(target)):
        raise ConfigError(f"[{sec.name}] target: need three finite coordinates")
    try:
        return GravityMode.landing(target, sec.float("k_decay", default.k_decay))
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}]: {exc}") from None


def _scenario(sec: Section) -> Scenario:
    """Scenario from a preset, optionally overriding boundary states and mode."""
    preset = sec.str("preset", "landing").lower()
    t_f = sec.float("t_f", 22.0)
    if preset == "takeoff":
        base = takeoff(t_f)
    elif preset == "landing":
        base = landing(t_f, incentivized=sec.str("mode", "incentivized").lower() != "standard")
    elif preset == "custom":
        base = None
    else:
        raise ConfigError(f"[{sec.name}] preset: expected takeoff, landing or custom, got {preset!r}")
    x0 = sec.floats("x0", None if base is None else list(base.bc.x0))
    xf = sec.floats("xf", None if base is None else list(base.bc.xf), allow_free=True)
    if x0 is None or xf is None:
        raise ConfigError(f"[{sec.name}]: custom scenarios need x0 and xf")
    if len(x0) != N_STATES or len(xf) != N_STATES:
        raise ConfigError(f"[{sec.name}]: x0 and xf need {N_STATES} entries ({', '.join(STATE_NAMES)})")
    free = [f.strip() for f in sec.str("free", "").replace(",", " ").split()]
    try:
        bc = BoundaryConditions.from_states(x0, xf, t_f, free=free)
    except ValueError as exc:
        raise ConfigError(f"[{sec.name}]: {exc}") from None
    mode = _mode(sec, base.mode if base else GravityMode.standard(), bc.xf)
    options = dict(base.options) if base else {}
    z_floor = sec.float("z_floor", None)
    if z_floor is not None:
        options["z_floor"] = z_floor
    angle = sec.float("angle_limit", None)
    if angle is not None:
        options["angle_limit"] = angle
    return Scenario(preset, bc, mode, options)


def _solve_kw(sec: Section, seed):
    init = sec.str("init", InitStrategy.LINEAR_INTERP.value)
    try:
        init = InitStrategy(init)
    except ValueError:
        raise ConfigError(f"[{sec.name}] init: unknown strategy {init!r}") from None
    return dict(init=init, tol=sec.float("tol", 1e-4), max_iter=sec.int("max_iter", 5000),
                constr_viol_tol=sec.float("constr_viol_tol", 1e-4),
                jitter=sec.float("jitter", 0.0), seed=seed)


def _exit_for(status: OptStatus) -> int:
    if status is OptStatus.OPTIMAL:
        return EXIT_OK
    return EXIT_INFEASIBLE if status is OptStatus.INFEASIBLE else EXIT_NUMERICAL


def study_optimize(cp, p, out, seed):
    sec = Section(cp, "optimize")
    scen = _scenario(sec)
    nodes = sec.int("nodes", 500)
    kw = _solve_kw(sec, seed)
    radius = sec.float("touchdown_radius", 0.25)
    sec.check_unused()
    try:
        nlp = scen.problem(p, nodes)
    except ValueError as exc:
        raise ConfigError(f"[optimize]: {exc}") from None
    res = solve(nlp, **kw)
    traj = res.trajectory
    rep = trajectory_energy(traj, p)
    cols = ("t",) + STATE_NAMES + CONTROL_NAMES + ("power_total", "power_m1", "power_m2",
                                                   "power_m3", "power_m4")
    write_csv(out / "optimize.csv", cols,
              np.column_stack([traj.t, traj.states, traj.controls, rep.series, rep.per_motor_series]))
    td_t = None
    xf = scen.bc.xf
    if np.all(scen.bc.xf_fixed[0:6]) and not np.any(xf[3:6]):
        # only a trajectory that ends at rest has a touchdown
        td_t, _ = touchdown(traj, xf[0:3], radius)
    write_json(out / "optimize.json", {
        "scenario": scen.name, "mode": scen.mode.name, "t_f_s": scen.bc.t_f, "nodes": nodes,
        "energy_J": res.energy, "status": res.status.value, "iterations": res.iterations,
        "touchdown_time_s": td_t, "constr_viol": res.constr_viol, "bound_viol": res.bound_viol,
        "seed": seed})
    return _exit_for(res.status)


def study_tf_sweep(cp, p, out, seed):
    sec = Section(cp, "tf-sweep")
    preset = sec.str("preset", "landing").lower()
    tf_values = sec.floats("tf_values", [15.0, 17.0, 19.0, 22.0, 26.0, 30.0])
    modes = [m.strip().lower() for m in sec.str("modes", "incentivized, standard").split(",") if m.strip()]
    nodes = sec.int("nodes", 500)
    workers = sec.int("workers", 1)
    kw = _solve_kw(sec, seed)
    sec.check_unused()
    if not tf_values:
        raise ConfigError("[tf-sweep] tf_values: empty")
    bcs, transcribe_kw = {}, {}
    for m in modes:
        if m not in ("incentivized", "standard"):
            raise ConfigError(f"[tf-sweep] modes: unknown mode {m!r}")
        if preset == "landing":
            scen = landing(tf_values[0], incentivized=(m == "incentivized"))
        elif preset == "takeoff":
            if m == "incentivized":
                raise ConfigError("[tf-sweep]: the takeoff ends moving, the landing incentive does not apply")
            scen = takeoff(tf_values[0])
        else:
            raise ConfigError(f"[tf-sweep] preset: expected landing or takeoff, got {preset!r}")
        bcs[scen.mode] = scen.bc
        transcribe_kw = dict(scen.options)
    rows = tf_sweep(bcs, p, tf_values, nodes=nodes, workers=workers, transcribe=transcribe_kw, **kw)
    write_csv(out / "tf-sweep.csv", ("t_f", "mode", "energy_J", "status"),
              [(r.t_f, r.mode, r.energy, r.status.value) for r in rows])
    write_json(out / "tf-sweep.json", {"preset": preset, "nodes": nodes, "seed": seed,
                                       "rows": [dict(zip(r.COLUMNS, r.as_tuple())) for r in rows]})
    return EXIT_OK


def study_mission(cp, p, out, seed):
    sec = Section(cp, "mission")
    names = [s.strip().lower() for s in sec.str("phases", "takeoff, cruise, landing").split(",") if s.strip()]
    nodes = sec.int("nodes", 500)
    kw = _solve_kw(sec, seed)
    t_to = sec.float("takeoff_tf", 22.0)
    t_la = sec.float("landing_tf", 22.0)
    incent = sec.str("landing_mode", "incentivized").lower() != "standard"
    distance = sec.float("cruise_distance", corridor_distance())
    entry = sec.float("cruise_entry_speed", None)
    t_end = sec.float("cruise_horizon", 60.0)
    sec.check_unused()
    reg_sec = Section(cp, "regulate")
    cfg, plant = _regulator(reg_sec)
    method = _method(reg_sec)
    phases = []
    for n in names:
        if n == "takeoff":
            phases.append(TakeoffPhase(takeoff(t_to), nodes, kw))
        elif n == "cruise":
            phases.append(CruisePhase(distance, cfg, plant, entry, t_end, method))
        elif n == "landing":
            phases.append(LandingPhase(landing(t_la, incent), nodes, kw))
        else:
            raise ConfigError(f"[mission] phases: unknown phase {n!r}")
    try:
        spec = MissionSpec(tuple(phases), p)
    except ValueError as exc:
        raise ConfigError(f"[mission]: {exc}") from None
    report = run_mission(spec)
    rows = [(ph.name, ph.energy, ph.duration, ph.distance, ph.status) for ph in report.phases]
    rows.append(("total", report.total_energy, report.total_duration, report.total_distance, ""))
    write_csv(out / "mission.csv", ("phase", "energy_J", "duration_s", "distance_m", "status"), rows)
    write_json(out / "mission.json", {**report.as_dict(), "seed": seed})
    return EXIT_OK


_STUDIES = {
    "epm-curve": study_epm_curve,
    "downwash-compare": study_downwash_compare,
    "regulate": study_regulate,
    "optimize": study_optimize,
    "tf-sweep": study_tf_sweep,
    "mission": study_mission,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plan", description="Energy studies for a delivery quadrotor.")
    ap.add_argument("study", nargs="?", choices=STUDIES)
    ap.add_argument("--config", type=Path, help="INI file with [drone] and per-study sections")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--print-defaults", action="store_true",
                    help="print the default drone parameters as a config section and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _load(config: Path | None):
    if config is None:
        return None, default_drone()
    cp = read_config(config)
    unknown = [s for s in cp.sections() if s != DRONE_SECTION and s not in STUDIES]
    if unknown:
        raise ConfigError(f"{config}: unknown sections {unknown}")
    p = params_from_mapping(dict(cp[DRONE_SECTION])) if cp.has_section(DRONE_SECTION) else default_drone()
    return cp, p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.print_defaults:
        sys.stdout.write(format_params(default_drone()))
        return EXIT_OK
    if args.study is None:
        build_parser().print_usage(sys.stderr)
        print("plan: error: a study is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cp, p = _load(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        return _STUDIES[args.study](cp, p, args.out, args.seed)
    except (ConfigError, ParamsError) as exc:
        print(f"plan: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissionError as exc:
        print(f"plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE if exc.status is OptStatus.INFEASIBLE else EXIT_NUMERICAL
    except (IntegrationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"plan: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
