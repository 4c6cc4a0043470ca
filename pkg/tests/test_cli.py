"""End-to-end command-line tests: exit codes, artifacts, config errors.

Every invocation goes through main(argv) in process, writing artifacts to
tmp_path. Runs are kept tiny; statistical assertions live elsewhere.
"""
import csv
import json

import pytest

from kpzlab.cli import ConeRefusal, main, resolve_side
from kpzlab.config import (ConfigError, ENV_WORKERS, effective_workers,
                           load_config)
from kpzlab.output import sha256_text


def read_doc(path):
    with open(path) as fh:
        return json.load(fh)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_decompose(out, *extra):
    args = ["decompose", "--out", str(out), "--set", "plan.t=1",
            "--set", "plan.replicas=5", "--set", "plan.epsilon=0.5"]
    args.extend(extra)
    return main(args)


# ---------------------------------------------------------------------------
# side resolution policy


def test_resolve_side_cone_exact():
    assert resolve_side("cone-exact", 0, 5) == 11
    assert resolve_side("cone-exact", 15, 5) == 15
    assert resolve_side("cone-exact", 0, 0) == 3
    with pytest.raises(ConeRefusal) as exc:
        resolve_side("cone-exact", 9, 5)
    assert exc.value.needed == 11
    assert "L >= 11" in str(exc.value)


def test_resolve_side_torus():
    assert resolve_side("torus", 8, 5) == 8
    with pytest.raises(ConfigError):
        resolve_side("torus", 0, 5)


# ---------------------------------------------------------------------------
# worker resolution


def test_effective_workers(monkeypatch):
    cfg = load_config(None, "simulate", [])
    monkeypatch.delenv(ENV_WORKERS, raising=False)
    assert effective_workers(cfg) == 1
    monkeypatch.setenv(ENV_WORKERS, "3")
    assert effective_workers(cfg) == 3
    monkeypatch.setenv(ENV_WORKERS, "abc")
    assert effective_workers(cfg) == 1
    cfg["run"]["workers"] = 2  # explicit config wins over the environment
    monkeypatch.setenv(ENV_WORKERS, "5")
    assert effective_workers(cfg) == 2


# ---------------------------------------------------------------------------
# simulate


def test_simulate_artifacts_and_manifest(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_WORKERS, raising=False)
    rc = main(["simulate", "--out", str(tmp_path), "--seed", "7",
               "--set", "plan.t=3"])
    assert rc == 0
    csv_path = tmp_path / "simulate-7.csv"
    doc = read_doc(tmp_path / "simulate-7.json")

    man = doc["manifest"]
    assert man["command"] == "simulate" and man["seed"] == 7
    assert man["workers"] == 1
    assert len(man["config_sha256"]) == 64
    assert "plan.t=3" in man["resolved_config"]
    assert set(man["versions"]) == {"kpzlab", "python", "numpy", "scipy"}
    assert man["wall_time_s"] >= 0.0
    assert doc["passed"] is True

    rep = doc["report"]
    assert rep["t"] == 3 and rep["d"] == 1
    assert rep["L"] == 7  # auto-resolved cone-exact side 2*3+1
    assert rep["height_min"] <= rep["height_mean"] <= rep["height_max"]

    raw = csv_path.read_bytes()
    assert raw.count(b"\r\n") == 8  # header + one row per site
    rows = read_rows(csv_path)
    assert len(rows) == 7
    assert {"x1", "value", "epsilon", "seed"} <= set(rows[0])


def test_cone_refusal_exit_2(tmp_path, capsys):
    rc = main(["simulate", "--out", str(tmp_path),
               "--set", "plan.t=50", "--set", "plan.l=21"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "needs side L >= 101" in err
    assert not list(tmp_path.iterdir())  # refused before writing anything


# ---------------------------------------------------------------------------
# decompose


def test_decompose_flat_first_step(tmp_path, capsys):
    # a height-zero start makes the mean and curvature parts exactly zero,
    # and the increment is exactly the keyed noise
    assert run_decompose(tmp_path) == 0
    out = capsys.readouterr().out
    assert "assertion lattice_identity_1e-10: PASS" in out
    assert "assertion macro_identity_1e-10: PASS" in out

    rows = read_rows(tmp_path / "decompose-0.csv")
    assert len(rows) == 5
    for r in rows:
        assert r["A"] == "0.0" and r["B"] == "0.0" and r["D"] == "0.0"
        assert r["C"] == r["increment"]
        assert float(r["C"]) != 0.0

    doc = read_doc(tmp_path / "decompose-0.json")
    assert doc["report"]["worst_lattice_residual_rel"] == 0.0
    assert doc["report"]["coefficients"]["nu"] == pytest.approx(1 / 3)


def test_decompose_degenerate_update_skips_macro(tmp_path):
    rc = run_decompose(tmp_path, "--set", "model.phi=ew")
    assert rc == 0
    doc = read_doc(tmp_path / "decompose-0.json")
    assert doc["report"]["degenerate_hessian"] is True
    assert set(doc["assertions"]) == {"lattice_identity_1e-10"}
    assert "coefficients" not in doc["report"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_decompose(a) == 0
    snapshot = (a / "decompose-0.csv").read_bytes()
    assert run_decompose(a) == 0  # same directory, same resolved config
    assert (a / "decompose-0.csv").read_bytes() == snapshot
    assert run_decompose(b) == 0  # out dir is hashed but rows ignore it
    assert (b / "decompose-0.csv").read_bytes() == snapshot
    da, db = read_doc(a / "decompose-0.json"), read_doc(b / "decompose-0.json")
    assert da["report"] == db["report"]
    assert sha256_text(da["manifest"]["resolved_config"]) == \
        da["manifest"]["config_sha256"]


def test_seed_flag_renames_artifacts_and_changes_data(tmp_path):
    assert run_decompose(tmp_path, "--seed", "9") == 0
    assert (tmp_path / "decompose-9.csv").exists()
    assert not (tmp_path / "decompose-0.csv").exists()
    assert run_decompose(tmp_path) == 0
    r0 = read_rows(tmp_path / "decompose-0.csv")
    r9 = read_rows(tmp_path / "decompose-9.csv")
    assert r0[0]["C"] != r9[0]["C"]


# ---------------------------------------------------------------------------
# check-phi


def test_check_phi_flags_curvature_free_update(tmp_path, capsys):
    rc = main(["check-phi", "--out", str(tmp_path), "--set", "model.phi=ew"])
    assert rc == 1
    out = capsys.readouterr().out
    assert "assertion nondegenerate_hessian: FAIL" in out
    doc = read_doc(tmp_path / "check-phi-0.json")
    assert doc["passed"] is False
    assert doc["assertions"]["nondegenerate_hessian"] is False
    assert doc["assertions"]["shift_additivity"] is True
    assert doc["assertions"]["monotonicity"] is True
    rows = read_rows(tmp_path / "check-phi-0.csv")
    assert {r["check"] for r in rows} >= {"monotonicity", "mean_domination"}


# ---------------------------------------------------------------------------
# walk-check


def test_walk_check_passes_at_default_horizon(tmp_path, capsys):
    rc = main(["walk-check", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "assertion derivative_agreement: PASS" in out
    assert "assertion mass_is_epsilon: PASS" in out
    doc = read_doc(tmp_path / "walk-check-0.json")
    assert doc["report"]["t"] == 4  # command overlay keeps the run small
    assert doc["report"]["sites_checked"] == 16  # 7 + 5 + 3 + 1 cone sites
    assert doc["report"]["worst_abs_diff"] <= doc["report"]["tolerance"]


# ---------------------------------------------------------------------------
# study dispatch


def test_gradient_study_cli(tmp_path):
    rc = main(["gradient", "--out", str(tmp_path),
               "--set", "plan.replicas=30",
               "--set", "plan.epsilon_grid=0.5 0.25"])
    assert rc == 0
    doc = read_doc(tmp_path / "gradient-0.json")
    assert doc["assertions"]["p95_band_bounded"] is True
    rows = read_rows(tmp_path / "gradient-0.csv")
    assert [float(r["epsilon"]) for r in rows] == [0.5, 0.25]


def test_plan_validation_error_exits_2(tmp_path, capsys):
    rc = main(["gradient", "--out", str(tmp_path),
               "--set", "plan.replicas=10"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# config file errors


def test_unknown_key_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[plan]\nreplicsa = 50\n")
    rc = main(["remainder", "--config", str(bad)])
    assert rc == 2
    err = capsys.readouterr().err
    assert f"{bad}, line 2: unknown key 'replicsa' in [plan]" in err


def test_unknown_section_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("# comment\n[plans]\nt = 3\n")
    rc = main(["simulate", "--config", str(bad)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "line 2: unknown section [plans]" in err


def test_bad_value_names_key(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[plan]\nreplicas = soon\n")
    rc = main(["remainder", "--config", str(bad)])
    assert rc == 2
    assert "bad value for plan.replicas" in capsys.readouterr().err


def test_missing_config_file(capsys):
    rc = main(["simulate", "--config", "/nonexistent/nope.ini"])
    assert rc == 2
    assert "cannot read config" in capsys.readouterr().err


def test_bad_set_syntax(capsys):
    assert main(["simulate", "--set", "replicas=50"]) == 2
    assert "--set expects section.key=value" in capsys.readouterr().err


def test_unknown_set_key(capsys):
    assert main(["simulate", "--set", "plan.nope=1"]) == 2
    assert "unknown key 'plan.nope'" in capsys.readouterr().err


def test_set_wins_over_file(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[plan]\nepsilon = 0.3\nt = 1\nreplicas = 3\n")
    rc = main(["decompose", "--config", str(ini), "--out", str(tmp_path),
               "--set", "plan.epsilon=0.2"])
    assert rc == 0
    doc = read_doc(tmp_path / "decompose-0.json")
    assert doc["report"]["epsilon"] == 0.2
    assert "plan.epsilon=0.2" in doc["manifest"]["resolved_config"]
    assert doc["report"]["replicas"] == 3  # untouched file values survive


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "kpzlab" in capsys.readouterr().out
