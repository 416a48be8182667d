"""Concurrent execution of claim and theorem jobs with results in submission order."""

from __future__ import annotations

import asyncio
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.errors import VerificationError
from dyadnorm.logging.events import EventLog, Phase
from dyadnorm.verify.claims import CLAIM_IDS, verify_claim
from dyadnorm.verify.report import ClaimReport
from dyadnorm.verify.theorems import THEOREM_TAGS, run_theorem


@dataclass(frozen=True)
class SuiteJob:
    name: str
    run: Callable[[], ClaimReport]


def claim_jobs(
    claims: Sequence[str] = CLAIM_IDS, settings: DyadnormSettings | None = None
) -> list[SuiteJob]:
    settings = settings or load_settings()
    return [
        SuiteJob(f"claim-{c}", lambda c=c: verify_claim(c, settings=settings))  # type: ignore[misc]
        for c in claims
    ]


def theorem_jobs(
    tags: Sequence[str] = THEOREM_TAGS,
    samples: int | None = None,
    seed: int = 0,
    settings: DyadnormSettings | None = None,
) -> list[SuiteJob]:
    settings = settings or load_settings()
    return [
        SuiteJob(tag, lambda t=tag: run_theorem(t, samples, seed, settings))  # type: ignore[misc]
        for tag in tags
    ]


async def run_suite(
    jobs: Sequence[SuiteJob],
    settings: DyadnormSettings | None = None,
    event_log: EventLog | None = None,
) -> list[ClaimReport]:
    """Run jobs on at most ``settings.workers`` threads.

    A job that trips an internal check becomes an inconsistent report. Any
    other failure is logged, the remaining jobs still finish, and the first
    such failure is raised afterwards.
    """
    settings = settings or load_settings()
    gate = asyncio.Semaphore(settings.workers)

    async def guarded(job: SuiteJob) -> ClaimReport:
        async with gate:
            return await asyncio.to_thread(job.run)

    results = await asyncio.gather(*(guarded(job) for job in jobs), return_exceptions=True)

    reports: list[ClaimReport] = []
    failure: BaseException | None = None
    for job, result in zip(jobs, results, strict=True):
        if isinstance(result, VerificationError):
            result = ClaimReport(
                claim=job.name,
                checks={"internal_checks": False},
                measured={},
                notes=[str(result)],
                series=[{"counterexample": result.counterexample}],
            )
        if isinstance(result, BaseException):
            if event_log:
                event_log.emit(
                    phase=Phase.VERIFY.value,
                    event_type="job.error",
                    summary=f"Job {job.name} failed: {result}",
                    data={"job": job.name, "error": str(result), "type": type(result).__name__},
                )
            failure = failure or result
            continue
        if event_log:
            event_log.emit(
                phase=Phase.VERIFY.value,
                event_type="job.done",
                summary=f"{job.name}: {result.verdict}",
                data={"job": job.name, "failed": result.failed_checks()},
                result=result.record(settings.float_digits),
            )
        reports.append(result)
    if failure is not None:
        raise failure
    return reports
