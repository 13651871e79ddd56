"""CLI behaviour: exit codes, outputs, config, determinism."""

from __future__ import annotations

import json
import subprocess
import sys

from chengsym.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILURE, main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_verify_symmetries_success(self, capsys):
        code, out, _ = run_cli(["verify-symmetries", "--system", "cheng"], capsys)
        assert code == EXIT_OK
        assert json.loads(out)["all_passed"] is True

    def test_failed_check_exits_one(self, capsys):
        code, out, _ = run_cli(
            ["verify-symmetries", "--field", "d/du", "--system", "cheng"], capsys
        )
        assert code == EXIT_VERIFICATION_FAILURE
        assert json.loads(out)["all_passed"] is False

    def test_bad_usage_exits_64(self, capsys):
        code, _, err = run_cli(["reduce", "case9"], capsys)
        assert code == EXIT_USAGE

    def test_unknown_solve_target_exits_64(self, capsys):
        code, _, err = run_cli(["solve", "warp-drive"], capsys)
        assert code == EXIT_USAGE
        assert "unknown solve target" in err

    def test_numerical_failure_exits_two(self, capsys):
        # quadrature profile vanishing inside the grid
        code, _, err = run_cli(
            ["report", "--solution", "general", "--g", "x - 3",
             "--grid", "1", "2", "2.5", "3.5", "--grid-points", "11", "11"],
            capsys,
        )
        assert code == EXIT_NUMERICAL

    def test_stationary_wave_speed_is_numerical_domain_error(self, capsys):
        code, _, err = run_cli(["reduce", "case1", "--c", "0"], capsys)
        assert code == EXIT_NUMERICAL


class TestCommands:
    def test_reduce_case1_reports_unit_multipliers(self, capsys):
        code, out, _ = run_cli(["reduce", "case1"], capsys)
        assert code == EXIT_OK
        body = json.loads(out)
        assert body["verifications"][0]["multipliers"] == ["1", "1"]

    def test_reduce_case2b_chart(self, capsys):
        code, out, _ = run_cli(
            ["reduce", "case2b", "--chart", "invariants", "--generator", "1"], capsys
        )
        body = json.loads(out)
        assert body["chart_reductions"][0]["derived"]["tag"] == "EulerLinearFirstOrder"

    def test_reduce_space_dep_with_coefficient(self, capsys):
        code, out, _ = run_cli(["reduce", "space-dep", "--c", "x"], capsys)
        assert code == EXIT_OK
        body = json.loads(out)
        assert body["selected_form"] == "derived"
        assert len(body["reduced"]) == 2

    def test_solve_riccati_check(self, capsys):
        code, out, _ = run_cli(["solve", "riccati", "--check"], capsys)
        assert code == EXIT_OK
        assert json.loads(out)["check_max_deviation"] < 1e-8

    def test_solve_travelling_derived_report(self, capsys):
        code, out, _ = run_cli(
            ["solve", "travelling", "--form", "derived", "--report",
             "--grid", "-1", "1", "-1", "1"],
            capsys,
        )
        body = json.loads(out)
        assert code == EXIT_OK
        assert body["residual_report"]["max_residual"] < 1e-10

    def test_solve_travelling_paper_reports_warning_not_failure(self, capsys):
        code, out, _ = run_cli(
            ["solve", "travelling", "--form", "paper", "--c-param", "2", "--report",
             "--grid", "-1", "1", "-1", "1", "--grid-points", "31", "31"],
            capsys,
        )
        body = json.loads(out)
        assert code == EXIT_OK
        assert body["warnings"]


class TestArtifacts:
    def test_output_files_and_env_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CHENGSYM_OUTPUT_DIR", str(tmp_path))
        code, out, _ = run_cli(
            ["--output", "report.json", "solve", "riccati", "--check",
             "--artifact", "riccati-traj"],
            capsys,
        )
        assert code == EXIT_OK
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "riccati-traj.csv").exists()
        header = (tmp_path / "riccati-traj.csv").read_text().splitlines()[0]
        assert header == "x,y0,err_estimate"
        assert json.loads((tmp_path / "report.json").read_text())["ok"] is True

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"case": "case2a"}))
        code, out, _ = run_cli(["--config", str(config), "reduce", "case2a"], capsys)
        assert code == EXIT_OK
        assert json.loads(out)["case"] == "case2a"

    def test_determinism_byte_identical(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CHENGSYM_OUTPUT_DIR", str(tmp_path))
        for name in ("one.json", "two.json"):
            code, _, _ = run_cli(
                ["--output", name, "verify-symmetries", "--seed", "42"], capsys
            )
            assert code == EXIT_OK
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()


class TestSubprocessEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "chengsym.cli", "verify-symmetries", "--system", "tw-ode"],
            capture_output=True, text=True, timeout=300,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["all_passed"] is True
