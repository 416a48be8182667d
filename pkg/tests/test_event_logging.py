"""Tests for event logging."""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from dyadnorm.logging.events import EventLog, Phase, RunDir


class TestRunDir:
    def test_creates_directory(self, tmp_path: Path) -> None:
        rd = RunDir(base=tmp_path / "runs")
        assert rd.path.exists()
        assert rd.path.is_dir()

    def test_has_expected_paths(self, run_dir: RunDir) -> None:
        assert run_dir.events_path.name == "events.jsonl"
        assert run_dir.config_path.name == "config.json"
        assert run_dir.result_path.name == "result.json"
        assert run_dir.profile_path.name == "profile.csv"
        assert run_dir.report_path.name == "report.json"

    def test_run_id_format(self, run_dir: RunDir) -> None:
        # Format: YYYYMMDDTHHMMZ_<8hex>
        parts = run_dir.run_id.split("_")
        assert len(parts) == 2
        assert parts[0].endswith("Z")
        assert len(parts[1]) == 8

    def test_explicit_run_id(self, tmp_path: Path) -> None:
        rd = RunDir(base=tmp_path, run_id="fixed")
        assert rd.path == tmp_path / "fixed"


class TestEventLog:
    def test_emit_and_read(self, run_dir: RunDir) -> None:
        log = EventLog(run_dir)
        log.emit(Phase.BUILD, "input.ready", "12 nodes", {"file": "f.fn"})
        log.close()

        lines = run_dir.events_path.read_text().strip().split("\n")
        assert len(lines) == 1
        event = json.loads(lines[0])
        assert event["phase"] == "BUILD"
        assert event["type"] == "input.ready"
        assert event["summary"] == "12 nodes"
        assert event["data"]["file"] == "f.fn"
        assert event["seq"] == 1
        assert event["run_id"] == run_dir.run_id

    def test_sequential_seq(self, run_dir: RunDir) -> None:
        log = EventLog(run_dir)
        log.emit("BUILD", "e1", "First")
        log.emit("EVALUATE", "e2", "Second")
        log.emit("EXPORT", "e3", "Third")
        log.close()

        lines = run_dir.events_path.read_text().strip().split("\n")
        seqs = [json.loads(line)["seq"] for line in lines]
        assert seqs == [1, 2, 3]

    def test_result_field(self, run_dir: RunDir) -> None:
        log = EventLog(run_dir)
        log.emit("VERIFY", "job.done", "claim-1: consistent", result={"verdict": "consistent"})
        log.close()

        event = json.loads(run_dir.events_path.read_text().strip())
        assert event["result"]["verdict"] == "consistent"

    def test_non_finite_and_numpy_values(self, event_log: EventLog) -> None:
        event = event_log.emit(
            "EVALUATE",
            "norm.done",
            "O^p = inf",
            data={
                "value": math.inf,
                "low": -math.inf,
                "bad": math.nan,
                "level": np.int64(-3),
                "weights": np.array([0.5, 0.25]),
                "file": Path("f.fn"),
            },
        )
        assert event["data"] == {
            "value": "+inf",
            "low": "-inf",
            "bad": "nan",
            "level": -3,
            "weights": [0.5, 0.25],
            "file": "f.fn",
        }
        raw = event_log.run_dir.events_path.read_text(encoding="utf-8")
        assert json.loads(raw.strip())["data"]["value"] == "+inf"

    def test_event_log_permissions_owner_only(self, run_dir: RunDir) -> None:
        log = EventLog(run_dir)
        log.emit("BUILD", "test", "hello")
        log.close()

        if os.name == "posix":
            mode = run_dir.events_path.stat().st_mode & 0o777
            assert mode & 0o077 == 0
