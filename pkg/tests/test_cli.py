import json
import subprocess
import sys

import numpy as np
import pytest

from invopt.cli import main
from invopt.harness import read_aggregated_csv


class TestRun:
    def test_happy_path(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code = main(
            [
                "run", "--family", "lp", "--d", "2", "--J", "4", "--iters", "15",
                "--trials", "2", "--methods", "psgd2,upa", "--seed", "42",
                "--out", str(out), "--threads", "1",
            ]
        )
        assert code == 0
        table = read_aggregated_csv(out)
        assert len(table) == 2 * 15
        assert out.with_suffix(".raw.csv").exists()
        assert "wrote" in capsys.readouterr().out

    def test_chan_for_scheduling_is_validation_error(self, tmp_path, capsys):
        code = main(
            [
                "run", "--family", "scheduling", "--d", "3", "--methods", "chan",
                "--iters", "5", "--trials", "1", "--out", str(tmp_path / "x.csv"),
            ]
        )
        assert code == 1
        assert "LP family" in capsys.readouterr().err

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        args = [
            "run", "--family", "scheduling", "--d", "2", "--iters", "10",
            "--trials", "1", "--methods", "psgd2", "--threads", "1",
        ]
        monkeypatch.setenv("INVOPT_SEED", "7")
        a = tmp_path / "a.csv"
        assert main(args + ["--out", str(a)]) == 0
        monkeypatch.delenv("INVOPT_SEED")
        b = tmp_path / "b.csv"
        assert main(args + ["--out", str(b), "--seed", "7"]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestVerify:
    def test_small_verify_passes(self, capsys):
        code = main(
            [
                "verify", "--family", "scheduling", "--d", "3", "--seed", "7",
                "--instances", "2", "--eq-samples", "20", "--spo-samples", "200",
                "--psi-draws", "100", "--iters", "50",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("PASS") == 5 and "FAIL" not in out

    def test_dimension_cap(self, capsys):
        code = main(["verify", "--family", "lp", "--d", "6", "--instances", "1"])
        assert code == 1
        assert "d <= 4" in capsys.readouterr().err


class TestProject:
    def test_prints_projection(self, capsys):
        assert main(["project", "--weights", "0.4,0.1"]) == 0
        assert capsys.readouterr().out.strip() == "0.65,0.35"

    def test_bad_vector(self, capsys):
        assert main(["project", "--weights", "a,b"]) == 1

    def test_too_short(self, capsys):
        assert main(["project", "--weights", "1.0"]) == 1


class TestSolveForward:
    def test_solves_instance_file(self, tmp_path, capsys):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"family": "scheduling", "d": 2, "r": [0.0, 0.0], "p": [2.0, 1.0]}))
        assert main(["solve-forward", "--instance", str(path), "--weights", "0.5,0.5"]) == 0
        assert json.loads(capsys.readouterr().out) == [-3.0, -1.0]

    def test_weight_length_mismatch(self, tmp_path, capsys):
        path = tmp_path / "inst.json"
        path.write_text(json.dumps({"family": "scheduling", "d": 2, "r": [0.0, 0.0], "p": [2.0, 1.0]}))
        assert main(["solve-forward", "--instance", str(path), "--weights", "1.0"]) == 1

    def test_missing_file(self, capsys):
        assert main(["solve-forward", "--instance", "/nope.json", "--weights", "1,0"]) == 1


class TestParsing:
    def test_unknown_flag_exits_one(self):
        with pytest.raises(SystemExit) as err:
            main(["run", "--nope"])
        assert err.value.code == 1

    def test_missing_subcommand_exits_one(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 1

    def test_console_script_installed(self):
        got = subprocess.run(
            [sys.executable, "-m", "invopt.cli", "project", "--weights", "2,0"],
            capture_output=True, text=True,
        )
        assert got.returncode == 0
        assert got.stdout.strip() == "1.0,0.0"
