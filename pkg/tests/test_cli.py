import json
import subprocess
import sys

import pytest

from balancedyn.cli import main
from balancedyn.constructions import j_state
from balancedyn.state import SignedState


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestConstruct:
    @pytest.mark.parametrize("argv, n", [
        (["--family", "j", "--n", "12"], 12),
        (["--family", "jprime", "--n", "72"], 72),
        (["--family", "s2d", "--d", "1"], 12),
        (["--family", "circular", "--k", "1", "--sizes", "2,2,2,2"], 8),
        (["--family", "er", "--n", "20", "--p", "0.3"], 20),
        (["--family", "ba", "--n", "30", "--d", "0.3"], 30),
        (["--family", "sparse", "--n", "48"], 48),
    ])
    def test_families(self, capsys, argv, n):
        code, out, _ = call(capsys, "construct", *argv)
        assert code == 0 and SignedState.loads(out).n == n

    def test_missing_param(self, capsys):
        code, _, err = call(capsys, "construct", "--family", "er", "--n", "10")
        assert code == 1 and "--p" in err

    def test_seeded(self, capsys):
        a = call(capsys, "construct", "--family", "er", "--n", "20", "--p", "0.5", "--seed", "4")[1]
        b = call(capsys, "construct", "--family", "er", "--n", "20", "--p", "0.5", "--seed", "4")[1]
        assert a == b


class TestRun:
    def test_trace(self, capsys, tmp_path):
        path = tmp_path / "j.txt"
        j_state(12).save(path)
        code, out, _ = call(capsys, "run", "--state", str(path), "--dynamics", "CTD")
        assert code == 0 and json.loads(out) == {"status": "Jammed", "flips": [], "attempts": 0, "seed": 0}
        final = tmp_path / "final.txt"
        code, out, _ = call(capsys, "run", "--state", str(path), "--dynamics", "BED", "--seed", "5",
                            "--trace-energy", "--final", str(final))
        trace = json.loads(out)
        assert trace["status"] == "Balanced" and len(trace["imbalance_after"]) == len(trace["flips"])
        assert trace["imbalance_after"][-1] == 0
        assert SignedState.load(final).imbalanced == 0

    def test_bad_inputs(self, capsys, tmp_path):
        assert call(capsys, "run", "--state", str(tmp_path / "missing"), "--dynamics", "BED")[0] == 1
        path = tmp_path / "j.txt"
        j_state(12).save(path)
        assert call(capsys, "run", "--state", str(path), "--dynamics", "XYZ")[0] == 1


class TestExperiment:
    def test_flags(self, capsys):
        code, out, _ = call(capsys, "experiment", "--family", "er", "--params", "0.5,1", "--sizes", "12",
                            "--dynamics", "CTD", "--runs", "4", "--seed", "2")
        lines = out.splitlines()
        assert code == 0 and len(lines) == 3 and lines[0].startswith("n,param,dynamics")

    def test_config_file_with_override(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("BALANCE_THREADS", "1")
        cfg = tmp_path / "c.cfg"
        cfg.write_text("family = er\nparams = 0.5\nsizes = 12\nruns = 3\n")
        out_file = tmp_path / "out.csv"
        code, _, _ = call(capsys, "experiment", "--config", str(cfg), "--runs", "2", "-o", str(out_file))
        row = out_file.read_text().splitlines()[1].split(",")
        assert code == 0 and row[3] == "2"

    def test_missing(self, capsys):
        assert call(capsys, "experiment", "--family", "er")[0] == 1


class TestAnalyze:
    def test_state(self, capsys, tmp_path):
        path = tmp_path / "j.txt"
        j_state(12).save(path)
        ref = tmp_path / "ref.txt"
        SignedState.loads("n 12\n" + "".join(f"{u} {v}\n" for u in range(12) for v in range(u + 1, 12)
                                             if (u < 8) == (v < 8))).save(ref)
        code, out, _ = call(capsys, "analyze", str(path), "--descriptors", "--closest", "exact", "--redblack", str(ref))
        rep = json.loads(out)
        assert code == 0 and rep["jammed"] and rep["closest"]["distance"] == 16
        assert rep["redblack"]["red_count"] == 16 and rep["redblack"]["lemma_ok"]
        assert rep["descriptors"]["smaller_clique"] is None

    def test_census(self, capsys):
        code, out, _ = call(capsys, "analyze", "--census", "5")
        assert code == 0 and json.loads(out)["census"]["balanced"] == 16

    def test_usage(self, capsys):
        assert call(capsys, "analyze")[0] == 1
        assert call(capsys, "analyze", "--census", "9")[0] == 1


class TestVerify:
    @pytest.mark.parametrize("theorem, extra", [
        ("counting", []),
        ("bed-converges", ["--runs", "5"]),
        ("reaching", ["--runs", "2"]),
        ("escaping", ["--runs", "2", "--seeds", "3"]),
        ("red-fast", ["--runs", "2", "--seeds", "2"]),
        ("jammed-fast", ["--seeds", "3"]),
    ])
    def test_passes(self, capsys, theorem, extra):
        code, out, _ = call(capsys, "verify", "--theorem", theorem, *extra)
        rep = json.loads(out)
        assert code == 0 and rep["ok"] and rep["theorem"] == theorem

    def test_failure_exit_code(self, capsys):
        # a step budget of 1 cannot balance random 16-vertex states
        code, out, _ = call(capsys, "verify", "--theorem", "bed-converges", "--runs", "3", "--max-steps", "1")
        assert code == 2 and not json.loads(out)["ok"]


def test_usage_exit_code():
    proc = subprocess.run([sys.executable, "-m", "balancedyn.cli", "verify", "--theorem", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "invalid choice" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "balancedyn.cli"], capture_output=True, text=True)
    assert proc.returncode == 1
