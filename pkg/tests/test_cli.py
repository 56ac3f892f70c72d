import json
import os
import subprocess
import sys

import pytest

from flatchain.cli import main

from conftest import FIXTURES


def fixture_path(tmp_path, name: str) -> str:
    target = tmp_path / name
    target.write_text(FIXTURES.joinpath(name).read_text())
    return str(target)


def run_cli(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


class TestCombinatoricsCommands:
    def test_canon_golden(self, tmp_path, capsys):
        code, out = run_cli(capsys, "canon", fixture_path(tmp_path, "ex_canon.mat"))
        assert code == 0
        payload = json.loads(out)
        assert payload["lambda"] == [1, 0, 4, 2, 3]
        assert payload["alpha"] == [3, 4, 0, 2, 1]
        assert payload["beta"] == [6, 5, 5, 3, 1]
        assert payload["tropical_determinant"] == 30

    def test_tropical_neg_inf(self, tmp_path, capsys):
        target = tmp_path / "none.mat"
        target.write_text("2 2\n0 -inf\n0 -inf\n")
        code, out = run_cli(capsys, "tropical", str(target))
        assert code == 0
        assert json.loads(out)["tropical_determinant"] == "-inf"

    def test_otest_golden(self, tmp_path, capsys):
        code, out = run_cli(capsys, "otest", fixture_path(tmp_path, "ex_otest.mat"))
        assert code == 0
        payload = json.loads(out)
        assert payload["Y"] == [1, 2, 4, 5, 7]
        assert payload["status"] == "found"

    def test_otest_failed_exit_code(self, tmp_path, capsys):
        target = tmp_path / "bad.mat"
        target.write_text("2 2\n1 2\n0 1\n")
        code, out = run_cli(capsys, "otest", str(target))
        assert code == 1
        assert json.loads(out)["status"] == "failed"

    def test_otest_on_system_file(self, tmp_path, capsys):
        code, out = run_cli(capsys, "otest", fixture_path(tmp_path, "ex_nnr.dsys"))
        assert code == 0
        assert json.loads(out)["flat_outputs"] == ["x1", "x2"]

    def test_oreg_golden(self, tmp_path, capsys):
        code, out = run_cli(
            capsys, "oreg", fixture_path(tmp_path, "ex_nnr.dsys"),
            "--point", '{"x5": 0, "x6": 1}',
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["Y"] == ["x1", "x3", "x4", "x6"]
        assert payload["nabla"] == pytest.approx(-2.0)

    def test_oreg_failed_exit_code(self, tmp_path, capsys):
        code, out = run_cli(
            capsys, "oreg", fixture_path(tmp_path, "ex_nnr.dsys"),
            "--point", '{"x5": 0, "x6": 0}',
        )
        assert code == 1
        assert json.loads(out)["failure"] == "structural"

    def test_parse_echoes_order_matrix(self, tmp_path, capsys):
        code, out = run_cli(capsys, "parse", fixture_path(tmp_path, "ex_jac.dsys"))
        assert code == 0
        payload = json.loads(out)
        assert payload["order_matrix"] == [[0, 1, "-inf"], [1, 2, 0], ["-inf", 3, 1]]

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "flatchain.cli", "no-such-command"],
            capture_output=True,
        )
        assert proc.returncode == 2

    @pytest.mark.parametrize(
        "argv",
        [
            ("canon", "ex_canon.mat"),
            ("tropical", "ex_jac.mat"),
            ("otest", "ex_otest.mat"),
            ("otest", "aircraft12.mat"),
            ("parse", "ex_nnr.dsys"),
            ("oreg", "ex_nnr.dsys", "--point", '{"x5": 0, "x6": 1}'),
        ],
    )
    def test_golden_outputs_are_byte_identical(self, tmp_path, argv):
        env = dict(os.environ)
        cmd = [sys.executable, "-m", "flatchain.cli", argv[0],
               fixture_path(tmp_path, argv[1]), *argv[2:]]
        outs = {subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
                for _ in range(2)}
        assert len(outs) == 1


class TestToleranceOverride:
    def test_flatchain_tol_env(self, tmp_path, capsys, monkeypatch):
        path = fixture_path(tmp_path, "ex_nnr.dsys")
        # absurdly large tolerance wipes out every pivot: structural failure
        monkeypatch.setenv("FLATCHAIN_TOL", "1e6")
        code, out = run_cli(capsys, "oreg", path, "--point", '{"x5": 1, "x6": 1}')
        assert code == 1
        monkeypatch.delenv("FLATCHAIN_TOL")
        code, out = run_cli(capsys, "oreg", path, "--point", '{"x5": 1, "x6": 1}')
        assert code == 0

    def test_exact_flag(self, tmp_path, capsys):
        code, out = run_cli(
            capsys, "oreg", fixture_path(tmp_path, "ex_nnr.dsys"),
            "--exact", "--point", '{"x5": 0, "x6": 1}',
        )
        assert code == 0
        assert json.loads(out)["Y"] == ["x1", "x3", "x4", "x6"]


class TestAircraftCommands:
    def test_stall_csv_and_record(self, tmp_path):
        out_csv = tmp_path / "sweep.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "flatchain.cli", "aircraft", "stall",
             "--params", "skylark.json", "--model", "simplified",
             "--out", str(out_csv)],
            capture_output=True, text=True, check=True,
        )
        record = json.loads(proc.stderr.strip().splitlines()[-1])
        assert record["case"] == "extremum"
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "alpha,V,F,delta_m"
        assert len(lines) > 100

    def test_plan_and_simulate_outputs(self, tmp_path, capsys):
        scenario = {
            "params_file": "skylark.json",
            "reference": {"kind": "helix", "speed": 30.0, "climb_rate": 5.0,
                           "t_final": 30.0, "z0": 1000.0},
            "output_set": "beta",
            "gains": {"k1": -5.0, "k2": -15.0},
            "perturbation": {"kind": "none"},
            "integrator": {"step": 0.005, "t_final": 2.0},
            "model": "simplified",
        }
        sc = tmp_path / "scenario.json"
        sc.write_text(json.dumps(scenario))
        plan_dir = tmp_path / "plan"
        code, out = run_cli(capsys, "aircraft", "plan", "--scenario", str(sc),
                            "--out", str(plan_dir))
        assert code == 0
        summary = json.loads(out)
        assert summary["max_dynamics_residual"] < 1e-4
        states = (plan_dir / "states.csv").read_text().splitlines()
        assert states[0].startswith("time,x,y,z,V")
        assert len(states) == summary["samples"] + 1
        for name in ("controls.csv", "errors.csv", "summary.json"):
            assert (plan_dir / name).exists()

        sim_dir = tmp_path / "sim"
        code, out = run_cli(capsys, "aircraft", "simulate", "--scenario", str(sc),
                            "--out", str(sim_dir))
        assert code == 0
        summary = json.loads(out)
        assert summary["status"] == "completed"
        errors = (sim_dir / "errors.csv").read_text().splitlines()
        assert errors[0] == "time,e_x,e_y,e_z,e_beta"
        first = errors[1].split(",")
        assert float(first[0]) == 0.0

    def test_fixtures_list(self, capsys):
        code, out = run_cli(capsys, "fixtures", "list")
        assert code == 0
        names = out.split()
        assert "ex_canon.mat" in names
        assert "skylark.json" in names
