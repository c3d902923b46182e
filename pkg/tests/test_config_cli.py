"""Expression grammar, TOML configuration, task outputs and CLI behavior."""

import json
import os

import numpy as np
import pytest

import curvedq as cq
from curvedq.cli import main
from curvedq.errors import ConfigError


# --- expression grammar ---------------------------------------------------

def test_expression_values():
    f = cq.compile_expression("sin(q1) * cosh(q2) + q1^2 / 4", ("q1", "q2"))
    q1, q2 = 0.7, -0.3
    assert f(q1, q2) == pytest.approx(
        np.sin(q1) * np.cosh(q2) + q1**2 / 4, abs=1e-15
    )
    g = cq.compile_expression("2 * pi - sqrt(exp(0))", ())
    assert g() == pytest.approx(2 * np.pi - 1.0, abs=1e-15)
    assert g.source == "2 * pi - sqrt(exp(0))"


def test_expression_vectorized():
    f = cq.compile_expression("cos(x) + y", ("x", "y"))
    x = np.linspace(0, 1, 5)
    assert np.allclose(f(x, 2.0), np.cos(x) + 2.0)


def test_expression_rejects_unsafe_input():
    for bad in (
        "__import__('os')",
        "open('x')",
        "q1.real",
        "lambda: 1",
        "q3 + 1",
        "sin(q1, q2)",
        "q1 @ q2",
        "'abc'",
        "1 +",
    ):
        with pytest.raises(ConfigError):
            cq.compile_expression(bad, ("q1", "q2"))


# --- config schema --------------------------------------------------------

def _minimal(surface=None, **sections):
    doc = {
        "surface": surface or {"kind": "sphere", "r": 1.0},
        "task": {"kind": "spectrum", "k": 4},
    }
    doc.update(sections)
    return doc


def test_config_defaults_applied():
    cfg = cq.config_from_dict(_minimal())
    assert cfg.grid["n1"] == 32 and cfg.grid["bc"] == ["auto", "auto"]
    assert cfg.field["gauge"] == "symmetric"
    assert cfg.physics["mass"] == 1.0
    assert cfg.output["formats"] == ["json", "csv"]
    assert cfg.task["k"] == 4
    assert isinstance(cfg.params, cq.PhysicalParams)


def test_config_error_messages_name_keys():
    with pytest.raises(ConfigError, match=r"\[surface\]"):
        cq.config_from_dict({"task": {"kind": "spectrum"}})
    with pytest.raises(ConfigError, match="surface.kind"):
        cq.config_from_dict(_minimal(surface={"r": 1.0}))
    with pytest.raises(ConfigError, match="surface.r"):
        cq.config_from_dict(_minimal(surface={"kind": "sphere", "r": -1.0}))
    with pytest.raises(ConfigError, match="grid.n1"):
        cq.config_from_dict(_minimal(grid={"n1": 2}))
    with pytest.raises(ConfigError, match="field.gauge"):
        cq.config_from_dict(_minimal(field={"gauge": "coulomb"}))
    with pytest.raises(ConfigError, match="field.B"):
        cq.config_from_dict(_minimal(field={"B": [0.0, 1.0]}))
    with pytest.raises(ConfigError, match="physics.mass"):
        cq.config_from_dict(_minimal(physics={"mass": 0.0}))
    with pytest.raises(ConfigError, match="task.kind"):
        cq.config_from_dict(
            {"surface": {"kind": "sphere"}, "task": {"kind": "explode"}}
        )
    with pytest.raises(ConfigError, match="output.formats"):
        cq.config_from_dict(_minimal(output={"formats": ["yaml"]}))


def test_config_hash_stable_and_sensitive():
    a = cq.config_from_dict(_minimal())
    b = cq.config_from_dict(_minimal())
    c = cq.config_from_dict(_minimal(grid={"n1": 48}))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()


def test_custom_surface_chart():
    doc = _minimal(
        surface={
            "kind": "custom",
            "x": "cos(q1)",
            "y": "sin(q1)",
            "z": "q2",
            "domain": [[0.0, 2 * np.pi], [0.0, 1.0]],
            "periodic": [True, False],
        }
    )
    cfg = cq.config_from_dict(doc)
    chart = cfg.build_chart()
    assert np.allclose(chart.map(0.5, 0.3), [np.cos(0.5), np.sin(0.5), 0.3])
    grid = cfg.build_run_grid(chart)
    assert grid.bc == ("periodic", "dirichlet")
    # the unit cylinder V_S = -1/8 is reproduced through the FD derivatives
    geo = cq.sample_geometry(chart, grid)
    assert np.allclose(geo.v_s_unit, -0.125, atol=1e-6)


def test_load_config_toml(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        '[surface]\nkind = "torus"\nbig_r = 2.0\nr = 1.0\n'
        '[grid]\nn1 = 8\nn2 = 8\n'
        '[task]\nkind = "geometry"\n'
    )
    cfg = cq.load_config(str(path))
    assert cfg.surface["kind"] == "torus"
    bad = tmp_path / "bad.toml"
    bad.write_text("[surface\nkind=")
    with pytest.raises(ConfigError):
        cq.load_config(str(bad))
    with pytest.raises(ConfigError):
        cq.load_config(str(tmp_path / "missing.toml"))


# --- tasks ----------------------------------------------------------------

def test_geometry_task_outputs(tmp_path):
    cfg = cq.config_from_dict(
        {
            "surface": {"kind": "sphere", "r": 2.0},
            "grid": {"n1": 8, "n2": 8},
            "task": {"kind": "geometry"},
        }
    )
    assert cq.run_task(cfg, output_dir=str(tmp_path)) == 0
    rows = (tmp_path / "geometry.csv").read_text().splitlines()
    assert rows[0] == "q1,q2,V_S,K,M,sqrt_g"
    assert len(rows) == 65
    first = dict(zip(rows[0].split(","), map(float, rows[1].split(","))))
    assert first["K"] == pytest.approx(0.25, abs=1e-12)
    assert abs(first["M"]) == pytest.approx(0.5, abs=1e-12)
    assert first["V_S"] == pytest.approx(0.0, abs=1e-12)
    meta = json.loads((tmp_path / "geometry.json").read_text())
    assert meta["metadata"]["config_hash"] == cfg.config_hash()


def test_spectrum_task_outputs_and_determinism(tmp_path):
    doc = {
        "surface": {"kind": "sphere", "r": 1.0},
        "grid": {"n1": 12, "n2": 12},
        "task": {"kind": "spectrum", "k": 3},
    }
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert cq.run_task(cq.config_from_dict(doc), seed=7, output_dir=str(out)) == 0
    payload = json.loads((out_a / "spectrum.json").read_text())
    assert payload["eigenvalues"][0] == pytest.approx(0.0, abs=1e-9)
    assert payload["eigenvalues"][1] == pytest.approx(1.0, rel=5e-2)
    assert max(payload["residuals"]) < 1e-9
    assert (out_a / "wavefunction_0.csv").exists()
    # byte-identical apart from the timestamp line
    for name in ("spectrum.json",):
        lines_a = (out_a / name).read_text().splitlines()
        lines_b = (out_b / name).read_text().splitlines()
        diff = [
            (la, lb) for la, lb in zip(lines_a, lines_b)
            if la != lb and "timestamp" not in la
        ]
        assert diff == []
    assert (out_a / "wavefunction_0.csv").read_text() == (
        out_b / "wavefunction_0.csv"
    ).read_text()


def test_spectrum_task_format_restriction(tmp_path):
    doc = {
        "surface": {"kind": "sphere", "r": 1.0},
        "grid": {"n1": 8, "n2": 8},
        "task": {"kind": "spectrum", "k": 2},
        "output": {"formats": ["json"]},
    }
    assert cq.run_task(cq.config_from_dict(doc), output_dir=str(tmp_path)) == 0
    assert (tmp_path / "spectrum.json").exists()
    assert not (tmp_path / "wavefunction_0.csv").exists()


def test_evolve_task_outputs(tmp_path):
    doc = {
        "surface": {"kind": "torus", "big_r": 2.0, "r": 1.0},
        "grid": {"n1": 8, "n2": 8},
        "task": {
            "kind": "evolve", "dt": 0.01, "steps": 5,
            "psi0_re": "cos(q1)", "psi0_im": "sin(q2)",
        },
    }
    assert cq.run_task(cq.config_from_dict(doc), output_dir=str(tmp_path)) == 0
    rows = (tmp_path / "trace.csv").read_text().splitlines()
    assert rows[0] == "t,norm,energy"
    assert len(rows) == 7
    norms = [float(r.split(",")[1]) for r in rows[1:]]
    assert np.allclose(norms, 1.0, atol=1e-10)


def test_scalar_potential_shifts_spectrum(tmp_path):
    base = {
        "surface": {"kind": "sphere", "r": 1.0},
        "grid": {"n1": 10, "n2": 10},
        "task": {"kind": "spectrum", "k": 1},
        "output": {"formats": ["json"]},
    }
    cq.run_task(cq.config_from_dict(base), output_dir=str(tmp_path / "v0"))
    shifted = dict(base)
    shifted["field"] = {"V": "3.5"}  # constant V shifts every level by Q V
    cq.run_task(cq.config_from_dict(shifted), output_dir=str(tmp_path / "v1"))
    e0 = json.loads((tmp_path / "v0" / "spectrum.json").read_text())["eigenvalues"][0]
    e1 = json.loads((tmp_path / "v1" / "spectrum.json").read_text())["eigenvalues"][0]
    assert e1 - e0 == pytest.approx(3.5, abs=1e-10)


# --- CLI ------------------------------------------------------------------

def test_cli_run_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[surface]\nkind = "sphere"\nr = 1.0\n'
        '[grid]\nn1 = 8\nn2 = 8\n'
        '[task]\nkind = "geometry"\n'
    )
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "geometry.csv").exists()
    # config errors exit 2 with a message on stderr
    bad = tmp_path / "bad.toml"
    bad.write_text('[surface]\nkind = "moebius"\n[task]\nkind = "geometry"\n')
    assert main(["run", str(bad), "--output-dir", str(tmp_path / "out")]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "nope.toml")]) == 2


def test_cli_spectrum_flags(tmp_path):
    code = main(
        [
            "spectrum", "--surface", "cylinder", "--r", "1.0", "--L", "6.0",
            "--B", "0,0.5,0", "--k", "4", "--n", "12x12",
            "--output-dir", str(tmp_path), "--format", "json", "--seed", "1",
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(payload["eigenvalues"]) == 4
    assert not (tmp_path / "wavefunction_0.csv").exists()
    assert main(["spectrum", "--surface", "cylinder", "--n", "bad"]) == 2


def test_cli_validate_geometry_suite(tmp_path, capsys):
    code = main(
        [
            "validate", "--suite", "geometry", "--seed", "7",
            "--output-dir", str(tmp_path), "--verbose",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
    payload = json.loads((tmp_path / "validation.json").read_text())
    assert payload["n_failed"] == 0
    assert payload["suite"] == "geometry"
    assert all(c["passed"] for c in payload["checks"])


def test_cli_thread_cap_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CURVEDQ_THREADS", "1")
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[surface]\nkind = "sphere"\nr = 1.0\n'
        '[grid]\nn1 = 8\nn2 = 8\n'
        '[task]\nkind = "spectrum"\nk = 2\n'
    )
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "out")]) == 0
    monkeypatch.setenv("CURVEDQ_THREADS", "banana")
    assert main(["run", str(cfg), "--output-dir", str(tmp_path / "out")]) == 0
