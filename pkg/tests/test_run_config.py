"""Tests for run configuration files and flag merging."""

from __future__ import annotations

from pathlib import Path

import pytest
from pydantic import ValidationError

from dyadnorm.config.run import RunConfig, load_run_config
from dyadnorm.dyadic.cube import unit_cube
from dyadnorm.errors import ParameterError
from dyadnorm.profile.models import LevelWindow


class TestRunConfig:
    def test_flags_only(self, function_file: Path) -> None:
        config = load_run_config("norm", None, file=function_file, p=2.0, gamma=0.5, k_min=-3)
        assert config.gamma1 == config.gamma2 == 0.5
        assert config.window == LevelWindow(-3, None)
        assert config.formats == ["json"]

    def test_file_then_flags(self, tmp_path: Path) -> None:
        path = tmp_path / "run.env"
        path.write_text("EXAMPLE=E4\nP=3\nFORMATS=csv, svg\nSCOPE=L0:k0:(0)\n", encoding="utf-8")
        config = load_run_config("norm", path, p=2.0)
        assert config.example == "E4"
        assert config.p == 2.0
        assert config.formats == ["csv", "svg"]
        assert config.scope_cube == unit_cube(1)

    def test_explicit_gamma1_wins_over_gamma(self, function_file: Path) -> None:
        config = load_run_config("profile", None, file=function_file, gamma=1.0, gamma1=0.25)
        assert config.gamma1 == 0.25
        assert config.gamma2 == 1.0

    def test_missing_config_file(self, tmp_path: Path) -> None:
        with pytest.raises(ParameterError, match="not found"):
            load_run_config("verify", tmp_path / "absent.env")

    @pytest.mark.parametrize(
        ("fields", "message"),
        [
            ({"command": "norm"}, "exactly one of file or example"),
            ({"command": "sweep", "example": "E4"}, "needs values"),
            ({"command": "sweep", "values": "1,2"}, "set example"),
            ({"command": "verify", "workers": 0}, "workers"),
            ({"command": "verify", "k_min": 2, "k_max": 1}, "empty window"),
            ({"command": "verify", "scope": "[0, 1)"}, "not a cube"),
            ({"command": "verify", "colour": "red"}, "colour"),
        ],
    )
    def test_rejects(self, fields: dict[str, object], message: str) -> None:
        with pytest.raises(ValidationError, match=message):
            RunConfig.model_validate(fields)

    def test_example_spec(self) -> None:
        config = RunConfig(command="example", example="E3", p=3.0, gamma1=0.5, depth=2)
        spec = config.example_spec(truncation=5)
        assert (spec.p, spec.gamma, spec.truncation, spec.depth) == (3.0, 0.5, 5, 2)

    def test_example_fixed_exponents(self) -> None:
        spec = RunConfig(command="example", example="E1", p=3.0).example_spec()
        assert spec.p == 1.0
        assert RunConfig(command="example", example="E4", p=2.0, gamma1=0.5).example_spec().gamma == 1.0

    def test_header_omits_defaults(self) -> None:
        header = RunConfig(command="verify", seed=5).header()
        assert header == {"command": "verify", "seed": 5}
