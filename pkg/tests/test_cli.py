import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import splitgof
from splitgof import dgps
from splitgof.cli import EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, main

SUNSPOTS = Path(splitgof.__file__).parent / "data" / "sunspots.csv"


def _series(tmp_path, name="ar1", n=120, seed=0):
    path = tmp_path / "y.csv"
    values = dgps.simulate(name, n, seed).values
    path.write_text("value\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("sub", ["test", "simulate", "mc", "bench", "empirical"])
def test_help(capsys, sub):
    code, out, _ = run(capsys, sub, "--help")
    assert code == EXIT_OK and "usage" in out


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "splitgof", "--help"], capture_output=True, text=True)
    assert done.returncode == 0 and "simulate" in done.stdout


class TestTest:
    def test_json(self, capsys, tmp_path):
        code, out, _ = run(capsys, "test", str(_series(tmp_path)), "--model", "ar:1", "--B", "50", "--json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert 0 <= data["p_value"] <= 1 and data["B"] == 50 and "elapsed_s" in data
        assert data["provenance"]["model"] == "ar:1"

    def test_text(self, capsys, tmp_path):
        code, out, _ = run(capsys, "test", str(_series(tmp_path)), "--model", "ar:1", "--B", "20",
                           "--weight", "cf")
        assert code == EXIT_OK and "p-value" in out and "cf" in out

    def test_byte_identical(self, capsys, tmp_path):
        path = str(_series(tmp_path))
        argv = ("test", path, "--model", "ar:1", "--B", "40", "--seed", "3", "--json", "--no-timing")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_fdwb(self, capsys, tmp_path):
        code, out, _ = run(capsys, "test", str(_series(tmp_path, n=60)), "--model", "ar:1",
                           "--scheme", "full", "--B", "3", "--json")
        assert code == EXIT_OK and json.loads(out)["provenance"]["scheme"] == "full_fdwb"

    @pytest.mark.parametrize("extra", [
        ("--model", "ar:x"), ("--model", "ar:1", "--alpha", "1.5"),
        ("--model", "ar:1", "--B", "0"), ("--model", "ar:1", "--split", "500:120"),
        ("--model", "ar:1", "--weight", "sine"),
    ])
    def test_usage_errors(self, capsys, tmp_path, extra):
        code, _, err = run(capsys, "test", str(_series(tmp_path)), *extra)
        assert code == EXIT_USAGE and err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "test", str(tmp_path / "none.csv"), "--model", "ar:1")
        assert code == EXIT_USAGE

    def test_computation_error(self, capsys, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("value\n" + "1.0\n" * 60)
        code, _, err = run(capsys, "test", str(path), "--model", "ar:1", "--B", "10")
        assert code == EXIT_COMPUTE and "computation failed" in err


class TestSimulate:
    def test_temmap_bounded(self, capsys):
        code, out, _ = run(capsys, "simulate", "--dgp", "temmap", "--n", "10", "--seed", "1")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        values = np.array([float(v) for v in lines[1:]])
        assert lines[0] == "value" and values.size == 10
        assert np.all((values >= 0) & (values <= 1))

    def test_matches_library(self, capsys, tmp_path):
        out_path = tmp_path / "s.csv"
        assert run(capsys, "simulate", "--dgp", "nar", "--n", "30", "--seed", "4",
                   "--out", str(out_path))[0] == EXIT_OK
        values = np.array([float(v) for v in out_path.read_text().split()[1:]])
        assert values.tobytes() == dgps.simulate("nar", 30, 4).values.tobytes()

    def test_drift(self, capsys):
        code, out, _ = run(capsys, "simulate", "--dgp", "ar1", "--n", "20", "--drift", "sin:0.3,2")
        assert code == EXIT_OK and len(out.split()) == 21

    @pytest.mark.parametrize("argv", [("--dgp", "nope", "--n", "20"), ("--dgp", "ar1", "--n", "5"),
                                      ("--dgp", "arch1", "--n", "20", "--drift", "sin:0.3,2"),
                                      ("--dgp", "ar1", "--n", "-3")])
    def test_usage(self, capsys, argv):
        assert run(capsys, "simulate", *argv)[0] == EXIT_USAGE


class TestMcBenchEmpirical:
    def test_mc_flags(self, capsys, tmp_path):
        code, out, _ = run(capsys, "mc", "--dgp", "ar1", "--null", "ar:1", "--n", "80", "--R", "3",
                           "--B", "20", "--threads", "1", "--out", str(tmp_path), "--json")
        assert code == EXIT_OK
        data = json.loads(out)
        assert data["config"]["R"] == 3 and data["estimator_calls"] == 3
        assert [row["test"] for row in data["report"]] == ["split-indicator", "split-cf"]
        assert (tmp_path / "reps.csv").is_file()

    def test_mc_config_echo(self, capsys, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text('dgp = "ar1"\nnull_model = "ar:1"\nn = 80\nR = 2\nB = 10\nthreads = 1\n')
        code, out, _ = run(capsys, "mc", "--config", str(cfg))
        assert code == EXIT_OK and out.startswith("# config:") and "rejection_rate" in out

    def test_mc_reps_identical_across_threads(self, capsys, tmp_path):
        base = ("mc", "--dgp", "ar1", "--null", "ar:1", "--n", "80", "--R", "4", "--B", "20")
        run(capsys, *base, "--threads", "1", "--out", str(tmp_path / "a"))
        run(capsys, *base, "--threads", "2", "--out", str(tmp_path / "b"))
        assert (tmp_path / "a" / "reps.csv").read_bytes() == (tmp_path / "b" / "reps.csv").read_bytes()

    @pytest.mark.parametrize("argv", [("--dgp", "ar1"), ("--config", "/nonexistent.toml"),
                                      ("--dgp", "ar1", "--null", "ar:1", "--tests", "cf:bogus")])
    def test_mc_usage(self, capsys, argv):
        assert run(capsys, "mc", *argv)[0] == EXIT_USAGE

    def test_bench(self, capsys, tmp_path):
        cfg = tmp_path / "b.toml"
        cfg.write_text('null_model = "ar:1"\nn = 80\nB = 10\nthreads = 1\n'
                       '[[experiment]]\ndgp = "ar1"\n[[experiment]]\ndgp = "nar"\n')
        code, out, _ = run(capsys, "bench", "--config", str(cfg), "--R", "2", "--json",
                           "--out", str(tmp_path / "t.csv"))
        assert code == EXIT_OK
        table = json.loads(out)["table"]
        assert [row["dgp"] for row in table] == ["ar1", "ar1", "nar", "nar"]
        assert (tmp_path / "t.csv").is_file()

    def test_empirical(self, capsys):
        code, out, _ = run(capsys, "empirical", str(SUNSPOTS), "--model", "const", "--model", "ar:2",
                           "--B", "30")
        assert code == EXIT_OK
        assert out.startswith("# data:") and "ar:2" in out and "const" in out

    def test_empirical_bad_model(self, capsys):
        assert run(capsys, "empirical", str(SUNSPOTS), "--model", "ma:2")[0] == EXIT_USAGE
