"""Tests for the concurrent suite runner."""

from __future__ import annotations

import json
import threading
import time

import pytest

from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.errors import ParameterError, VerificationError
from dyadnorm.logging.events import EventLog
from dyadnorm.verify.report import ClaimReport
from dyadnorm.verify.runner import SuiteJob, claim_jobs, run_suite, theorem_jobs


def _report(name: str, ok: bool = True, delay: float = 0.0) -> SuiteJob:
    def run() -> ClaimReport:
        time.sleep(delay)
        return ClaimReport(claim=name, checks={"ok": ok})

    return SuiteJob(name, run)


class TestRunSuite:
    @pytest.mark.asyncio
    async def test_results_in_submission_order(self, settings: DyadnormSettings) -> None:
        settings.workers = 3
        jobs = [_report("slow", delay=0.05), _report("fast"), _report("bad", ok=False)]
        reports = await run_suite(jobs, settings)
        assert [r.claim for r in reports] == ["slow", "fast", "bad"]
        assert [r.passed for r in reports] == [True, True, False]

    @pytest.mark.asyncio
    async def test_worker_limit(self, settings: DyadnormSettings) -> None:
        settings.workers = 2
        lock = threading.Lock()
        running = peak = 0

        def run() -> ClaimReport:
            nonlocal running, peak
            with lock:
                running += 1
                peak = max(peak, running)
            time.sleep(0.02)
            with lock:
                running -= 1
            return ClaimReport(claim="x")

        await run_suite([SuiteJob(f"job-{i}", run) for i in range(6)], settings)
        assert peak <= 2

    @pytest.mark.asyncio
    async def test_failed_internal_check_is_inconsistent(self, settings: DyadnormSettings) -> None:
        def run() -> ClaimReport:
            raise VerificationError("chain sum too large", {"leaf": "L0:k-3:(1)"})

        (report,) = await run_suite([SuiteJob("claim-9", run)], settings)
        assert report.verdict == "inconsistent"
        assert report.checks == {"internal_checks": False}
        assert report.series == [{"counterexample": {"leaf": "L0:k-3:(1)"}}]

    @pytest.mark.asyncio
    async def test_other_errors_raised_after_all_jobs(
        self, settings: DyadnormSettings, event_log: EventLog
    ) -> None:
        def run() -> ClaimReport:
            raise ParameterError("bad job")

        with pytest.raises(ParameterError, match="bad job"):
            await run_suite([SuiteJob("broken", run), _report("fine")], settings, event_log)
        lines = event_log.run_dir.events_path.read_text(encoding="utf-8").splitlines()
        types = sorted(json.loads(line)["type"] for line in lines)
        assert types == ["job.done", "job.error"]

    @pytest.mark.asyncio
    async def test_events_carry_reports(self, settings: DyadnormSettings, event_log: EventLog) -> None:
        await run_suite([_report("claim-1")], settings, event_log)
        event = json.loads(event_log.run_dir.events_path.read_text(encoding="utf-8").strip())
        assert event["phase"] == "VERIFY"
        assert event["result"]["verdict"] == "consistent"


class TestJobs:
    def test_job_names(self, settings: DyadnormSettings) -> None:
        assert [j.name for j in claim_jobs(["1", "3"], settings)] == ["claim-1", "claim-3"]
        assert [j.name for j in theorem_jobs(["biparam"], settings=settings)] == ["biparam"]
