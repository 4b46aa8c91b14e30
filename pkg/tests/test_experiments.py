import json
import os
import signal
import subprocess
import sys
import time

import numpy as np
import pytest

from phi4.cli import main as cli_main
from phi4.experiments import (
    ConfigError,
    ExperimentSpec,
    FTLE_COLUMNS,
    ftle_row,
    parse_spec,
    run_sweep,
)
from phi4.grids import TorusGrid
from phi4.solver import FieldPath, SolverConfig
from phi4.storage import load_field, load_path, save_field, save_path

from conftest import random_field


def sweep_doc(tmp_path, **over):
    doc = {
        "mode": "sweep", "dim": 2, "cutoff": 4, "dt": 2e-3, "horizon": 0.05,
        "burn_in": 0.05, "alphas": [0.5, -0.5], "seeds": [0, 1, 2],
        "out_dir": str(tmp_path / "out"), "tol": 1e-8, "max_iter": 80,
    }
    doc.update(over)
    return doc


class TestParseSpec:
    def test_valid(self, tmp_path):
        spec = parse_spec(sweep_doc(tmp_path))
        assert spec.mode == "sweep"
        assert spec.alphas == (0.5, -0.5)
        assert spec.seeds == (0, 1, 2)

    def test_seed_range(self, tmp_path):
        spec = parse_spec(sweep_doc(tmp_path, seeds={"start": 3, "stop": 6}))
        assert spec.seeds == (3, 4, 5)

    def test_empty_sweep_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_spec(sweep_doc(tmp_path, alphas=[]))
        with pytest.raises(ConfigError):
            parse_spec(sweep_doc(tmp_path, seeds=[]))

    def test_bad_mode_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_spec(sweep_doc(tmp_path, mode="nonsense"))

    def test_workers_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PHI4_WORKERS", "3")
        doc = sweep_doc(tmp_path)
        doc.pop("workers", None)
        assert parse_spec(doc).workers == 3


class TestSweep:
    def test_rows_complete_and_ordered(self, tmp_path):
        spec = parse_spec(sweep_doc(tmp_path))
        csv_path = run_sweep(spec)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == ",".join(FTLE_COLUMNS)
        assert len(lines) == 1 + 6
        alphas = [line.split(",")[0] for line in lines[1:]]
        assert alphas == ["0.5"] * 3 + ["-0.5"] * 3

    def test_rerun_is_idempotent(self, tmp_path):
        spec = parse_spec(sweep_doc(tmp_path))
        csv_path = run_sweep(spec)
        first = csv_path.read_bytes()
        run_sweep(spec)
        assert csv_path.read_bytes() == first

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        doc1 = sweep_doc(tmp_path, out_dir=str(tmp_path / "w1"), workers=1)
        doc2 = sweep_doc(tmp_path, out_dir=str(tmp_path / "w4"), workers=4)
        p1 = run_sweep(parse_spec(doc1))
        p2 = run_sweep(parse_spec(doc2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_crash_resume_matches_uninterrupted(self, tmp_path):
        doc = sweep_doc(tmp_path, out_dir=str(tmp_path / "full"))
        full = run_sweep(parse_spec(doc)).read_bytes()

        # simulate an interrupted run: keep only a prefix (and a torn line)
        part_dir = tmp_path / "part"
        doc2 = sweep_doc(tmp_path, out_dir=str(part_dir))
        part_dir.mkdir()
        lines = full.decode().splitlines(keepends=True)
        (part_dir / "ftle.csv").write_text("".join(lines[:3]) + lines[3][:17])
        resumed = run_sweep(parse_spec(doc2)).read_bytes()
        assert resumed == full

    def test_row_values_deterministic(self, tmp_path):
        cfg = SolverConfig(dim=2, cutoff=4, dt=2e-3, horizon=0.05, alpha=0.5)
        a = ftle_row(cfg, 0.05, 0.5, 7, tol=1e-8, max_iter=80)
        b = ftle_row(cfg, 0.05, 0.5, 7, tol=1e-8, max_iter=80)
        assert a == b


class TestCli:
    def test_exit_2_on_missing_mode(self, capsys):
        assert cli_main([]) == 2

    def test_exit_2_on_bad_config(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli_main(["--config", str(bad), "sweep"]) == 2

    def test_exit_2_on_empty_sweep(self, tmp_path, capsys):
        cfgf = tmp_path / "c.json"
        cfgf.write_text(json.dumps(sweep_doc(tmp_path, alphas=[])))
        assert cli_main(["--config", str(cfgf)]) == 2

    def test_sweep_via_cli_writes_manifest(self, tmp_path, capsys):
        cfgf = tmp_path / "c.json"
        cfgf.write_text(json.dumps(sweep_doc(
            tmp_path, alphas=[0.5], seeds=[0], out_dir=str(tmp_path / "o"))))
        assert cli_main(["--config", str(cfgf)]) == 0
        manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
        assert manifest["mode"] == "sweep"
        assert "version" in manifest
        assert (tmp_path / "o" / "ftle.csv").exists()

    def test_steer_verb(self, tmp_path, capsys):
        out = tmp_path / "steer"
        rc = cli_main(["--out", str(out), "steer", "--alpha", "1.0",
                       "--lambdas", "-2,0,1"])
        assert rc == 0
        lines = (out / "steer.csv").read_text().splitlines()
        assert lines[0].startswith("lambda_target,kappa,phi0,f,c")
        assert len(lines) == 4
        for line in lines[1:]:
            assert float(line.split(",")[-1]) < 1e-6  # abs_err column

    def test_wick_check_verb(self, tmp_path, capsys):
        cfgf = tmp_path / "c.json"
        cfgf.write_text(json.dumps({
            "mode": "wick-check", "dim": 2, "cutoffs": [4, 8],
            "n_samples": 2000, "out_dir": str(tmp_path / "w")}))
        assert cli_main(["--config", str(cfgf)]) == 0
        lines = (tmp_path / "w" / "wick.csv").read_text().splitlines()
        assert lines[0] == "N,m,C_N,emp_var,se,zscore"
        assert len(lines) == 3
        z4 = float(lines[1].split(",")[-1])
        assert abs(z4) < 4.0

    def test_stationary_then_ftle_verbs(self, tmp_path, capsys):
        out = tmp_path / "st"
        cfgf = tmp_path / "c.json"
        cfgf.write_text(json.dumps({
            "mode": "stationary", "dim": 2, "cutoff": 4, "dt": 2e-3,
            "horizon": 0.05, "burn_in": 0.05, "alphas": [0.5], "seeds": [3],
            "out_dir": str(out)}))
        assert cli_main(["--config", str(cfgf)]) == 0
        qfiles = sorted(out.glob("qpath_*.fpath"))
        assert len(qfiles) == 1
        rc = cli_main(["--out", str(out), "ftle", "--in", str(qfiles[0])])
        assert rc == 0
        lines = (out / "ftle.csv").read_text().splitlines()
        assert len(lines) == 2
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert row["alpha"] == "0.5"
        assert row["seed"] == "3"
        assert row["converged"] == "true"

    def test_besov_verb(self, tmp_path, capsys):
        g = TorusGrid(2, 4)
        f = random_field(g, 33)
        path = tmp_path / "field.fpath"
        save_field(path, f, kind="field")
        rc = cli_main(["besov", "--in", str(path), "--betas", "-0.1,0.5"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "besov(-0.1)" in out
        assert "block" in out

    def test_simulate_verb(self, tmp_path, capsys):
        out = tmp_path / "sim"
        cfgf = tmp_path / "c.json"
        cfgf.write_text(json.dumps({
            "mode": "simulate", "dim": 2, "cutoff": 4, "dt": 2e-3,
            "horizon": 0.05, "burn_in": 0.0, "alphas": [0.2], "seeds": [1],
            "out_dir": str(out)}))
        assert cli_main(["--config", str(cfgf)]) == 0
        files = sorted(out.glob("phipath_*.fpath"))
        assert len(files) == 1
        fp, header = load_path(files[0])
        assert header["kind"] == "solution"
        assert len(fp) > 1


class TestStorage:
    def test_round_trip_exact(self, tmp_path):
        g = TorusGrid(2, 5)
        coeffs = np.stack([random_field(g, 40 + i).coeffs for i in range(4)])
        fp = FieldPath(g, 0.25 * np.arange(4), coeffs)
        f = tmp_path / "p.fpath"
        save_path(f, fp, kind="test", meta={"alpha": 1.5})
        back, header = load_path(f)
        assert np.array_equal(back.coeffs, coeffs)
        assert np.array_equal(back.times, fp.times)
        assert header["meta"]["alpha"] == 1.5
        assert back.grid == g

    def test_single_field_round_trip(self, tmp_path):
        g = TorusGrid(1, 8)
        f = random_field(g, 50)
        p = tmp_path / "f.fpath"
        save_field(p, f)
        back, _ = load_field(p)
        assert np.array_equal(back.coeffs, f.coeffs)

    def test_rejects_foreign_files(self, tmp_path):
        p = tmp_path / "x.fpath"
        p.write_bytes(b'{"format": "something-else"}\n')
        with pytest.raises(ValueError):
            load_path(p)


class TestDegenerateSweep:
    def test_zero_noise_amplitude_gives_deterministic_rate(self, tmp_path):
        # with the noise off and a strongly contracting parameter the
        # stationary state is the origin, the potential vanishes, and the
        # exponent equals alpha exactly
        doc = sweep_doc(tmp_path, alphas=[-20.0], seeds=[0],
                        noise_amp=0.0, horizon=0.1, burn_in=0.1)
        csv_path = run_sweep(parse_spec(doc))
        row = csv_path.read_text().splitlines()[1].split(",")
        lam = float(row[6])
        assert lam == pytest.approx(-20.0, abs=1e-10)
