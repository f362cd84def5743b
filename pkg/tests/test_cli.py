import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from damped_rotor import AxisLabel, BodyParams, IntegratorConfig, State, StopReason, analyze, cli
from damped_rotor import integrate
from damped_rotor.config import ConfigError, parse_run_config
from damped_rotor.integrator import CSV_HEADER
from damped_rotor.presets import PRESETS, preset, preset_checksum
from damped_rotor.sweep import SWEEP_COLUMNS, draw_initial_states, parse_sweep_config

PRESET_SHA256 = "583224b741720258651b6d2fb928a1293382cf0ee30838457a3fca267501bf20"
P237 = {"A": [2, 3, 7], "I": 1, "k": 1}


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_presets_pinned():
    assert preset_checksum() == PRESET_SHA256
    params, s = preset("fig-unstable")
    assert params.as_tuple() == (3.0, 3.0, 7.0, 1.0, 1.0)
    assert s.vector.tolist() == [1.5, 3.0, 0.0, -1.0, -2.01, 0.0]
    assert preset("fig-attain")[1].vector.tolist() == [1, 0, 0, 0, 1, 0]
    with pytest.raises(KeyError):
        preset("fig-missing")


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_simulate_presets(tmp_path, name):
    rc = cli.main(["simulate", "--preset", name, "--out", str(tmp_path), "--gnuplot"])
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["attained_axis"] == PRESETS[name]["expect_axis"]
    assert report["stop_reason"] == "Converged"
    with open(tmp_path / "trajectory.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == CSV_HEADER
    assert "trajectory.csv" in (tmp_path / "plot.gp").read_text()
    if name == "fig-attain":
        assert report["attainability"]["satisfied"] is False
        assert report["attainability"]["condition_values"] == [-6.0]


def test_simulate_exit_two_on_horizon(tmp_path):
    rc = cli.main(["simulate", "--preset", "fig-unstable", "--t-end", "3", "--out", str(tmp_path)])
    assert rc == 2
    assert json.loads((tmp_path / "report.json").read_text())["stop_reason"] == "HorizonReached"


def test_flags_override_config(tmp_path):
    cfg = write_json(tmp_path / "run.json", {
        "params": {"A": [3, 3, 7]}, "omega0": [9, 9, 9], "omega10": [0, 0, 1],
        "integrator": {"t_end": 50}, "outputs": str(tmp_path / "from_file"),
    })
    out = tmp_path / "from_flag"
    rc = cli.main(["simulate", "--config", cfg, "--omega0", "0", "0", "1", "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["initial_state"]["omega"] == [0.0, 0.0, 1.0]
    assert report["integrator"]["t_end"] == 50.0
    assert not (tmp_path / "from_file").exists()


def test_env_default_output(tmp_path, monkeypatch):
    monkeypatch.setenv("DAMPED_ROTOR_OUT", str(tmp_path / "env"))
    assert cli.main(["simulate", "--A", "3", "3", "7", "--omega0", "0", "0", "1",
                     "--omega10", "0", "0", "1"]) == 0
    assert (tmp_path / "env" / "trajectory.csv").exists()


@pytest.mark.parametrize(
    "data, field",
    [
        ({"params": {"A": [7, 3, 3]}, "omega0": [1, 0, 0], "omega10": [0, 0, 0]}, "params"),
        ({"params": {"A": [2, 3]}, "omega0": [1, 0, 0], "omega10": [0, 0, 0]}, "params.A"),
        ({"params": P237, "omega0": [1, 0], "omega10": [0, 0, 0]}, "omega0"),
        ({"params": P237, "omega0": [1, 0, 0]}, "omega10"),
        ({"params": P237, "omega0": [1, 0, 0], "omega10": [0, 0, "x"]}, "omega10"),
        ({"params": P237, "omega0": [1, 0, 0], "omega10": [0, 0, 0],
          "integrator": {"rel_tol": -1}}, "rel_tol"),
        ({"params": P237, "omega0": [1, 0, 0], "omega10": [0, 0, 0], "seed": -3}, "seed"),
        ({"params": P237, "omega0": [1, 0, 0], "omega10": [0, 0, 0], "colour": 1}, "colour"),
    ],
)
def test_malformed_config_names_field(tmp_path, capsys, data, field):
    cfg = write_json(tmp_path / "bad.json", data)
    assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert field in capsys.readouterr().err
    with pytest.raises(ConfigError, match=field.split(".")[0]):
        parse_run_config(data)


def test_unreadable_config(tmp_path, capsys):
    (tmp_path / "x.json").write_text("{not json")
    assert cli.main(["simulate", "--config", str(tmp_path / "x.json")]) == 1
    assert "not valid JSON" in capsys.readouterr().err
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.json")]) == 1


def test_classify_table(tmp_path, capsys):
    assert cli.main(["classify", "--A", "2", "3", "7", "--I", "1", "--k", "1",
                     "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    rows = list(csv.DictReader(open(tmp_path / "classification.csv")))
    got = [(r["axis"], r["verdict"], r["n_unstable"]) for r in rows]
    assert got == [("Axis1", "NormallyHyperbolic", "2"), ("Axis2", "NormallyHyperbolic", "1"),
                   ("Axis3", "NormallyStable", "0")]
    assert "NormallyStable" in text and "Axis2" in text


def test_classify_plane_and_sphere(tmp_path, capsys):
    cli.main(["classify", "--A", "3", "3", "7", "--json", "--out", str(tmp_path)])
    recs = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [(r["axis"], r["verdict"]) for r in recs] == [
        ("Plane12", "NormallyHyperbolic"), ("Axis3", "NormallyStable")]
    assert recs[0]["zero_multiplicity"] == 2
    cli.main(["classify", "--A", "5", "5", "5", "--json", "--out", str(tmp_path)])
    recs = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert len(recs) == 1 and recs[0]["verdict"] == "SphericalDegenerate"


def test_classify_eigensolver_failure_dumps_matrix(tmp_path, capsys, monkeypatch):
    import damped_rotor.eigen as eig

    monkeypatch.setattr(eig, "ITS_PER_EIGENVALUE", 0)
    assert cli.main(["classify", "--A", "2", "3", "7", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "did not converge" in err and "[[" in err


def sweep_cfg(tmp_path, **extra):
    data = {"params": P237, "count": 1, "box": [-1, 1], "seed": 42}
    data.update(extra)
    return write_json(tmp_path / "sweep.json", data)


def test_sweep_is_byte_deterministic(tmp_path):
    cfg = sweep_cfg(tmp_path)
    cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")])
    cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    lines = a.decode().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS) and lines[-1].startswith("# count=1")


def test_sweep_jobs_do_not_change_bytes(tmp_path):
    cfg = sweep_cfg(tmp_path, count=12)
    cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "serial")])
    cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "pool"), "--jobs", "3"])
    assert (tmp_path / "serial" / "sweep.csv").read_bytes() == \
        (tmp_path / "pool" / "sweep.csv").read_bytes()


def test_sweep_hundred_converge(tmp_path):
    # small-momentum draws spin up slowly (gap ~ 0.85 rbar^2), so a few need
    # more than the default horizon; every one of them converges given time
    cli.main(["sweep", "--config", sweep_cfg(tmp_path, count=100), "--out", str(tmp_path)])
    rows = list(csv.DictReader(l for l in open(tmp_path / "sweep.csv") if not l.startswith("#")))
    assert len(rows) == 100
    slow = [r for r in rows if r["stop_reason"] != "Converged"]
    assert all(r["stop_reason"] == "HorizonReached" for r in slow)
    assert all(r["attained_axis"] for r in rows if r["stop_reason"] == "Converged")
    assert len(slow) <= 10
    params = BodyParams(2, 3, 7)
    for r in slow:
        y = [float(r[c]) for c in ("p0", "q0", "r0", "p10", "q10", "r10")]
        rep = analyze(integrate(params, State.from_vector(y), IntegratorConfig(t_end=1e4)))
        assert rep.stop_reason is StopReason.CONVERGED
        assert rep.attained_axis is AxisLabel.AXIS3


def test_sweep_near_major_axis(tmp_path):
    cfg = sweep_cfg(tmp_path, count=100, box=[-1e-3, 1e-3], center=[0, 0, 1, 0, 0, 1])
    cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)])
    rows = list(csv.DictReader(l for l in open(tmp_path / "sweep.csv") if not l.startswith("#")))
    assert sum(r["attained_axis"] == "Axis3" for r in rows) >= 99


def test_sweep_draws_follow_philox():
    cfg = parse_sweep_config({"params": P237, "count": 3, "box": [-3, 3], "seed": 0})
    ys = draw_initial_states(cfg)
    ref = np.random.Generator(np.random.Philox(0)).uniform(-3, 3, size=(3, 6))
    np.testing.assert_array_equal(ys, ref)
    assert ys[0, 0] == pytest.approx(-2.9155977860061135, abs=0)


def test_sweep_records_failures_without_aborting(tmp_path):
    cfg = sweep_cfg(tmp_path, count=3, integrator={"t_end": 0.5})
    assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "sweep.csv").read_text()
    rows = list(csv.DictReader(l for l in text.splitlines() if not l.startswith("#")))
    assert len(rows) == 3 and all(r["stop_reason"] == "HorizonReached" for r in rows)
    assert all("HorizonReached" in r["error"] for r in rows)


def test_sweep_config_errors(tmp_path, capsys):
    assert cli.main(["sweep", "--config", sweep_cfg(tmp_path, count=0)]) == 1
    assert "count" in capsys.readouterr().err
    assert cli.main(["sweep", "--config", sweep_cfg(tmp_path, box=[1, -1])]) == 1
    assert "box" in capsys.readouterr().err


def test_reproduce(tmp_path, capsys):
    assert cli.main(["reproduce", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count(" ok") == 3
    for name in PRESETS:
        assert (tmp_path / name / "report.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "damped_rotor", "classify", "--A", "1", "2", "3",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and "Axis3" in proc.stdout
