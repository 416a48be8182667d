"""Shared test fixtures."""

from __future__ import annotations

import os
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.function.step import StepFunction
from dyadnorm.logging.events import EventLog, RunDir


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep DYADNORM_* variables from the developer's shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("DYADNORM_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def run_dir(tmp_path: Path) -> RunDir:
    """Create a temporary run directory."""
    return RunDir(base=tmp_path / "runs")


@pytest.fixture
def event_log(run_dir: RunDir) -> Iterator[EventLog]:
    """Create an event log in a temporary run directory."""
    log = EventLog(run_dir)
    yield log
    log.close()


@pytest.fixture
def settings(tmp_path: Path) -> DyadnormSettings:
    """Settings with small budgets and runs under the temporary directory."""
    return DyadnormSettings(
        _env_file=None,  # type: ignore[call-arg]
        max_nodes=200_000,
        max_cubes=50_000,
        max_tail_terms=128,
        quadrature_max_samples=1 << 12,
        run_base=tmp_path / "runs",
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(7)


@pytest.fixture
def staircase() -> StepFunction:
    """f = 1 on [0, 1/2), 3 on [1/2, 3/4), 0 elsewhere."""
    return StepFunction.from_leaves(
        [(DyadicCube(0, -1, (0,)), 1.0), (DyadicCube(0, -2, (2,)), 3.0)],
        frame_level=0,
        dimension=1,
    )


@pytest.fixture
def function_file(tmp_path: Path) -> Path:
    """A one-dimensional function file against Lebesgue measure."""
    path = tmp_path / "f.fn"
    path.write_text(
        """---
dimension: 1
frame_level: 0
outside_value: 0.0
---
L0:k-1:(0) 1.0
L0:k-2:(2) 3/1
""",
        encoding="utf-8",
    )
    return path
