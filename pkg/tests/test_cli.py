"""Tests for CLI commands."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from dyadnorm.cli import app

runner = CliRunner()


@pytest.fixture
def workspace(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run from an empty directory with runs kept under it."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("DYADNORM_RUN_BASE", str(tmp_path / "runs"))
    return tmp_path


class TestVersion:
    def test_version(self) -> None:
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert "dyadnorm" in result.output


class TestNormCommand:
    def test_lp_norm_of_file(self, workspace: Path, function_file: Path) -> None:
        out = workspace / "out"
        result = runner.invoke(
            app, ["norm", "--file", str(function_file), "--norm", "lp", "--p", "1", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "result.json").read_text(encoding="utf-8"))
        assert payload["results"][0]["value"] == "1.25"
        assert payload["config"]["command"] == "norm"

    def test_scoped_oscillation_norm(self, workspace: Path, function_file: Path) -> None:
        out = workspace / "out"
        result = runner.invoke(
            app,
            ["norm", "-f", str(function_file), "--p", "1", "--scope", "L0:k0:(0)", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        record = json.loads((out / "result.json").read_text(encoding="utf-8"))["results"][0]
        assert float(record["value"]) == pytest.approx(1.75)
        assert record["exactness"] == "exact"

    def test_run_directory_gets_events(self, workspace: Path, function_file: Path) -> None:
        result = runner.invoke(app, ["norm", "--file", str(function_file), "--norm", "lp"])
        assert result.exit_code == 0, result.output
        (run,) = (workspace / "runs").iterdir()
        assert (run / "config.json").exists()
        assert (run / "result.json").exists()
        types = [json.loads(line)["type"] for line in (run / "events.jsonl").read_text().splitlines()]
        assert types[0] == "run.start"
        assert types[-1] == "run.done"

    def test_needs_one_input(self, workspace: Path) -> None:
        result = runner.invoke(app, ["norm", "--norm", "lp"])
        assert result.exit_code == 2
        assert "exactly one of file or example" in result.output

    def test_missing_file(self, workspace: Path) -> None:
        result = runner.invoke(app, ["norm", "--file", str(workspace / "absent.fn")])
        assert result.exit_code == 2


class TestProfileCommand:
    def test_truncated_profile_exits_3(self, workspace: Path, function_file: Path) -> None:
        args = ["profile", "-f", str(function_file), "--scope", "L0:k0:(0)", "--k-min", "0", "--k-max", "0"]
        result = runner.invoke(app, [*args, "--out", str(workspace / "out")])
        assert result.exit_code == 3
        assert "--allow-truncation" in result.output

    def test_allow_truncation(self, workspace: Path, function_file: Path) -> None:
        out = workspace / "out"
        args = ["profile", "-f", str(function_file), "--scope", "L0:k0:(0)", "--k-min", "0", "--k-max", "0"]
        result = runner.invoke(app, [*args, "--allow-truncation", "--format", "svg", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = (out / "profile.csv").read_text(encoding="utf-8").splitlines()
        assert "lambda,W,lambda_p_W,source" in lines
        assert (out / "profile.svg").read_text(encoding="utf-8").startswith("<svg")


class TestExampleCommand:
    def test_writes_facts_and_function(self, workspace: Path) -> None:
        out = workspace / "out"
        result = runner.invoke(app, ["example", "E0", "--out", str(out)])
        assert result.exit_code == 0, result.output
        facts = json.loads((out / "facts.json").read_text(encoding="utf-8"))
        assert facts["spec"]["id"] == "E0"
        assert (out / "E0.fn").exists()

    def test_invalid_parameters(self, workspace: Path) -> None:
        result = runner.invoke(app, ["example", "E1", "--truncation", "9"])
        assert result.exit_code == 2


class TestSweepCommand:
    def test_lp_across_truncations(self, workspace: Path) -> None:
        out = workspace / "out"
        result = runner.invoke(
            app,
            ["sweep", "--values", "1,2", "--example", "E4", "--norm", "lp", "--p", "2", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        lines = (out / "sweep.csv").read_text(encoding="utf-8").splitlines()
        rows = [line for line in lines if not line.startswith("#")]
        assert rows[0] == "truncation,norm,value,exactness"
        assert len(rows) == 3
        assert (out / "sweep.json").exists()


class TestDecomposeCommand:
    def test_decompose_file(self, workspace: Path, function_file: Path) -> None:
        out = workspace / "out"
        result = runner.invoke(app, ["decompose", "-f", str(function_file), "--p", "1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        text = (out / "decomposition.txt").read_text(encoding="utf-8")
        assert text.startswith("0\tL0:k0:(0)\t")
        summary = json.loads((out / "decomposition.json").read_text(encoding="utf-8"))["summary"]
        assert "chains" in summary


class TestVerifyCommand:
    def test_unknown_claim(self, workspace: Path) -> None:
        result = runner.invoke(app, ["verify", "--claim", "7"])
        assert result.exit_code == 2
        assert "unknown claims" in result.output
