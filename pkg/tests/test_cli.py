import json
import subprocess
import sys

import pytest

from obsassign.assignment import PairAssignment
from obsassign.benchmark import rows_from_csv
from obsassign.cli import bundled_examples, main
from obsassign.tracking import SimulationTrace


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "obsassign.cli", *map(str, args)],
                          capture_output=True, text=True)


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_examples_bundled():
    assert {"circular6", "adversarial", "case1", "pair_benchmark", "general_benchmark"} <= set(bundled_examples())


class TestAssign:
    def test_case1_unique(self, tmp_path):
        out = tmp_path / "a.json"
        assert main(["assign", "case1", "--problem", "unique", "--out", str(out)]) == 0
        res = json.loads(out.read_text())
        assert res["total_value"] == pytest.approx(0.5345, abs=5e-5)
        assert res["solver"] == "greedy" and res["elapsed_ms"] >= 0
        assert res["entries"][0]["sensors"] == [1, 3]
        assert PairAssignment.from_dict(res).by_target() == {1: (1, 3)}

    def test_relaxed_at_least_unique(self, tmp_path):
        vals = {}
        for problem in ("unique", "relaxed"):
            out = tmp_path / f"{problem}.json"
            assert main(["assign", "case1", "--problem", problem, "--out", str(out)]) == 0
            vals[problem] = json.loads(out.read_text())["total_value"]
        assert vals["relaxed"] >= vals["unique"]

    def test_general_and_exact(self, tmp_path):
        g, e = tmp_path / "g.json", tmp_path / "e.json"
        assert main(["assign", "case1", "--problem", "general", "--out", str(g)]) == 0
        assert main(["assign", "case1", "--problem", "general", "--exact", "--out", str(e)]) == 0
        rg, re_ = json.loads(g.read_text()), json.loads(e.read_text())
        assert rg["bundles"] == {"1": [1, 2, 3]} and rg["measure"] == "LogDet"
        assert re_["total_value"] >= rg["total_value"] - 1e-9

    def test_stdout(self, capsys):
        assert main(["assign", "case1"]) == 0
        assert json.loads(capsys.readouterr().out)["problem"] == "unique"

    def test_infeasible_exit_2(self, tmp_path):
        cfg = write(tmp_path, "c.json", {"sensors": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 4, "y": 0},
                                                     {"id": 3, "x": 0, "y": 4}],
                                         "targets": [{"id": 1, "x": 1, "y": 1}, {"id": 2, "x": 2, "y": 2}]})
        r = run_cli("assign", cfg, "--problem", "unique")
        assert r.returncode == 2
        assert "N >= 2L" in r.stderr

    def test_config_error_exit_1(self, tmp_path):
        cfg = write(tmp_path, "c.json", {"sensors": [{"id": 1, "x": 0}], "targets": []})
        r = run_cli("assign", cfg)
        assert r.returncode == 1 and "sensors[0].y" in r.stderr

    def test_collision_exit_1(self, tmp_path):
        cfg = write(tmp_path, "c.json", {"sensors": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 1, "y": 0}],
                                         "targets": [{"id": 1, "x": 1e-12, "y": 0}]})
        assert run_cli("assign", cfg).returncode == 1

    def test_missing_file(self, tmp_path):
        assert main(["assign", str(tmp_path / "none.json")]) == 1


class TestSimulate:
    def test_circular6(self, tmp_path):
        assert main(["simulate", "circular6", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "circular6.csv").read_text()
        trace = SimulationTrace.from_csv(text)
        assert len(trace.rows) == 315
        assert trace.to_csv() == text
        summary = json.loads((tmp_path / "circular6_summary.json").read_text())
        assert summary["steps"] == 315 and summary["targets"]["1"]["pair_switches"] > 0

    def test_zero_steps(self, tmp_path):
        cfg = write(tmp_path, "z.json", {"sensors": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 9, "y": 0}],
                                         "targets": [{"id": 1, "x": 3, "y": 3}], "steps": 0})
        assert main(["simulate", str(cfg), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "z.csv").read_text().count("\n") == 1

    def test_adversarial_summary(self, tmp_path):
        assert main(["simulate", "adversarial", "--out", str(tmp_path)]) == 0
        s = json.loads((tmp_path / "adversarial_summary.json").read_text())["targets"]["1"]
        assert "fraction_above_threshold" in s

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert main(["simulate", "adversarial", "--out", str(d)]) == 0
        assert (a / "adversarial.csv").read_bytes() == (b / "adversarial.csv").read_bytes()
        assert (a / "adversarial_summary.json").read_bytes() == (b / "adversarial_summary.json").read_bytes()


class TestBenchmark:
    def test_pair_deterministic(self, tmp_path):
        cfg = write(tmp_path, "s.json", {"mode": "pair-benchmark", "L": [1, 3], "trials": 1, "seed": 5})
        outs = []
        for d, workers in (("a", "1"), ("b", "2")):
            assert main(["benchmark", str(cfg), "--out", str(tmp_path / d), "--workers", workers]) == 0
            outs.append((tmp_path / d / "pair_benchmark.csv").read_bytes())
            assert (tmp_path / d / "pair_benchmark_summary.json").exists()
        assert outs[0] == outs[1]
        rows = rows_from_csv(outs[0].decode())
        header = outs[0].decode().splitlines()[0]
        assert header == "L,N,trial,omega_greedy,omega_mwpbm,omega_mwpbm_div3"
        assert all(r["omega_greedy"] >= r["omega_mwpbm_div3"] for r in rows)

    def test_general(self, tmp_path):
        cfg = write(tmp_path, "g.json", {"mode": "general-benchmark", "L": 2, "N": [4, 5], "trials": 2})
        assert main(["benchmark", str(cfg), "--out", str(tmp_path)]) == 0
        rows = rows_from_csv((tmp_path / "general_benchmark.csv").read_text())
        assert [r["N"] for r in rows] == [4, 4, 5, 5]

    def test_bad_sweep(self, tmp_path):
        cfg = write(tmp_path, "b.json", {"mode": "pair-benchmark", "trials": 0})
        r = run_cli("benchmark", cfg, "--out", tmp_path)
        assert r.returncode == 1 and "trials" in r.stderr

    def test_bad_workers(self, tmp_path):
        assert main(["benchmark", "pair_benchmark", "--out", str(tmp_path), "--workers", "0"]) == 1


def test_log_env(tmp_path):
    r = subprocess.run([sys.executable, "-m", "obsassign.cli", "assign", "case1"], capture_output=True, text=True,
                       env={"OBSASSIGN_LOG": "INFO", "PATH": ""})
    assert r.returncode == 0 and "total_value" in r.stderr
