import json
import subprocess
import sys

import numpy as np
import pytest

from flightenergy.cli import main


def _run(tmp_path, study, config=None, *extra):
    args = [study, "--out", str(tmp_path)]
    if config is not None:
        cfg = tmp_path / "cfg.ini"
        cfg.write_text(config)
        args += ["--config", str(cfg)]
    return main(args + list(extra))


def test_print_defaults(capsys):
    assert main(["--print-defaults"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("[drone]") and "omega_max = 1200.0" in out


def test_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "flightenergy.cli", "epm-curve", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert json.loads((tmp_path / "epm-curve.json").read_text())["v_star_m_s"] == pytest.approx(11.93)


def test_epm_curve_columns(tmp_path):
    assert _run(tmp_path, "epm-curve", "[epm-curve]\nv_min = 1\nv_max = 20\nstep = 0.5\n") == 0
    lines = (tmp_path / "epm-curve.csv").read_text().splitlines()
    assert lines[0] == "v_a,total,induced,parasitic,profile,rotor,avionics,thrust,downwash"
    assert len(lines) == 1 + 39


def test_downwash_compare_blanks(tmp_path):
    cfg = "[downwash-compare]\nv_min = 0.5\nv_max = 5\nstep = 0.5\nglauert_v_min = 2\n"
    assert _run(tmp_path, "downwash-compare", cfg) == 0
    lines = (tmp_path / "downwash-compare.csv").read_text().splitlines()
    assert lines[0] == "v,w_R,w_H,w_G,EPM_R,EPM_H,EPM_G"
    assert len(lines) == 11
    assert lines[1].split(",")[3] == "" and lines[-1].split(",")[3] != ""


@pytest.mark.parametrize("study, cfg", [
    ("epm-curve", ""),
    ("regulate", "[regulate]\nnoise_std = 0.05\nt_end = 20\n"),
])
def test_reproducible(tmp_path, study, cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert _run(a, study, cfg, "--seed", "5") == 0
    assert _run(b, study, cfg, "--seed", "5") == 0
    for ext in ("csv", "json"):
        assert (a / f"{study}.{ext}").read_bytes() == (b / f"{study}.{ext}").read_bytes()


def test_regulate_summary(tmp_path):
    assert _run(tmp_path, "regulate") == 0
    s = json.loads((tmp_path / "regulate.json").read_text())
    assert abs(s["steady_airspeed_m_s"] - 11.9) < 0.3


@pytest.mark.parametrize("cfg", [
    "[drone]\nm1 = -1\n",
    "[drone]\nbogus = 1\n",
    "[epm-curve]\nv_min = abc\n",
    "[epm-curve]\nspeed = 3\n",
    "[nonsense]\na = 1\n",
    "[epm-curve]\nmethod = magic\n",
])
def test_config_errors(tmp_path, cfg, capsys):
    assert _run(tmp_path, "epm-curve", cfg) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["epm-curve", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == 2


HOP = """
[optimize]
preset = custom
mode = standard
t_f = {t_f}
nodes = 41
x0 = 0 0 5  0 0 0  0 0 0  0 0 0  1145.0700 1145.0700 1145.0700 1145.0700
xf = 0 0 {z1} 0 0 0  0 0 0  0 0 0  free free free free
"""


def test_optimize_custom(tmp_path):
    assert _run(tmp_path, "optimize", HOP.format(t_f=4.0, z1=8.0)) == 0
    s = json.loads((tmp_path / "optimize.json").read_text())
    assert s["status"] == "optimal" and s["energy_J"] > 0 and s["constr_viol"] < 1e-4
    data = np.genfromtxt(tmp_path / "optimize.csv", delimiter=",", names=True)
    assert data.size == 41 and "power_total" in data.dtype.names
    np.testing.assert_allclose(data["power_total"],
                               sum(data[f"power_m{i}"] for i in range(1, 5)), rtol=1e-12)


def test_optimize_infeasible_exit_code(tmp_path):
    assert _run(tmp_path, "optimize", HOP.format(t_f=2.0, z1=65.0)) == 3
    assert json.loads((tmp_path / "optimize.json").read_text())["status"] == "infeasible"


def test_optimize_bad_state_length(tmp_path):
    assert _run(tmp_path, "optimize", "[optimize]\npreset = custom\nx0 = 1 2 3\nxf = 1 2 3\n") == 2


def test_mission_cruise_only(tmp_path):
    cfg = "[mission]\nphases = cruise\ncruise_entry_speed = 4\ncruise_distance = 5670.21\n"
    assert _run(tmp_path, "mission", cfg) == 0
    s = json.loads((tmp_path / "mission.json").read_text())
    assert s["total_energy_J"] == pytest.approx(42.17 * 5670.21, rel=0.05)
    assert (tmp_path / "mission.csv").read_text().splitlines()[-1].startswith("total,")


def test_mission_invalid(tmp_path):
    assert _run(tmp_path, "mission", "[mission]\nphases = cruise\n") == 2
    assert _run(tmp_path, "mission", "[mission]\nphases = cruise, swim\ncruise_entry_speed = 3\n") == 2
