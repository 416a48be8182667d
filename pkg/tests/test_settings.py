"""Tests for settings."""

from __future__ import annotations

import os
from pathlib import Path
from unittest.mock import patch

import pytest

from dyadnorm.config.settings import DyadnormSettings, load_settings


class TestSettings:
    def test_defaults(self) -> None:
        s = DyadnormSettings(_env_file=None)  # type: ignore[call-arg]
        assert s.workers == 1
        assert s.max_tail_terms == 512
        assert s.float_digits == 17
        assert s.run_base == Path(".dyadnorm/runs")
        assert s.pilot_constant == 64.0

    def test_env_prefix(self) -> None:
        env = {"DYADNORM_WORKERS": "4", "DYADNORM_MAX_CUBES": "1000"}
        with patch.dict(os.environ, env, clear=False):
            s = DyadnormSettings(_env_file=None)  # type: ignore[call-arg]
            assert s.workers == 4
            assert s.max_cubes == 1000

    def test_env_file(self, tmp_path: Path) -> None:
        env_file = tmp_path / ".env"
        env_file.write_text("DYADNORM_FLOAT_DIGITS=6\n", encoding="utf-8")
        s = DyadnormSettings(_env_file=env_file)  # type: ignore[call-arg]
        assert s.float_digits == 6

    def test_overrides_drop_none(self) -> None:
        with patch.dict(os.environ, {"DYADNORM_WORKERS": "3"}, clear=False):
            assert load_settings(workers=None).workers == 3
            assert load_settings(workers=2).workers == 2

    @pytest.mark.parametrize(
        ("field", "value", "message"),
        [
            ("workers", 0, "workers"),
            ("max_tail_terms", 4, "max_tail_terms"),
            ("quadrature_tolerance", 1.0, "quadrature_tolerance"),
            ("float_digits", 18, "float_digits"),
            ("tail_span_bits", 2, "tail_span_bits"),
        ],
    )
    def test_rejects_bad_budgets(self, field: str, value: object, message: str) -> None:
        with pytest.raises(ValueError, match=message):
            DyadnormSettings(_env_file=None, **{field: value})  # type: ignore[call-arg, arg-type]
