"""Command runner: wires inputs, numerics, event logging and output files together."""

from __future__ import annotations

import asyncio
from pathlib import Path
from typing import Any

from rich.console import Console

from dyadnorm.config.run import RunConfig
from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.constructions.build import build_example
from dyadnorm.dyadic.cube import unit_cube
from dyadnorm.errors import ParameterError, TruncationError
from dyadnorm.function.io import dumps_function, read_function_and_measure
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.logging.events import EventLog, Phase, RunDir
from dyadnorm.norms.results import NormResult
from dyadnorm.output import svg, tables
from dyadnorm.profile.build import build_profile
from dyadnorm.profile.evaluate import ProfileRow, profile_rows
from dyadnorm.ui.console import ConsoleUI
from dyadnorm.verify.claims import CLAIM_IDS
from dyadnorm.verify.report import ClaimReport
from dyadnorm.verify.runner import claim_jobs, run_suite, theorem_jobs
from dyadnorm.verify.theorems import THEOREM_TAGS


class Orchestrator:
    """Runs one command per call; every run gets its own run directory and event log."""

    def __init__(self, settings: DyadnormSettings, console: Console | None = None) -> None:
        self.settings = settings
        self.ui = ConsoleUI(console, settings.float_digits)

    # ---- inputs -----------------------------------------------------------------------

    def load_input(
        self, config: RunConfig, truncation: int | None = None
    ) -> tuple[StepFunction, DyadicMeasure | None, dict[str, Any]]:
        if config.file is not None:
            f, mu = read_function_and_measure(config.file)
            return f, None if mu.is_lebesgue else mu, {"file": str(config.file)}
        built = build_example(config.example_spec(truncation))
        return built.function, None, dict(built.facts)

    def _open(self, config: RunConfig) -> tuple[RunDir, EventLog, Path]:
        run_dir = RunDir(base=self.settings.run_base)
        log = EventLog(run_dir)
        tables.write_text(run_dir.config_path, tables.dumps_json(config.header()))
        out = config.out or run_dir.path
        out.mkdir(parents=True, exist_ok=True)
        self.ui.header(config.command, config.header())
        log.emit(
            phase=Phase.BUILD.value,
            event_type="run.start",
            summary=f"{config.command} started",
            data={"config": config.header(), "out": str(out)},
        )
        return run_dir, log, out

    def _require_exact(self, config: RunConfig, results: list[NormResult]) -> None:
        truncated = [r.norm for r in results if r.exactness == "truncated"]
        if truncated and not config.allow_truncation:
            raise TruncationError(
                f"{', '.join(truncated)} only available over a truncated window; "
                "pass --allow-truncation to accept it"
            )

    # ---- commands ---------------------------------------------------------------------

    def norm(self, config: RunConfig) -> list[NormResult]:
        run_dir, log, out = self._open(config)
        try:
            f, mu, facts = self.load_input(config)
            log.emit(Phase.BUILD.value, "input.ready", f"{f.node_count} nodes", data=facts)
            results, estimate = self._evaluate(config, f, mu)
            for r in results:
                log.emit(
                    Phase.EVALUATE.value,
                    "norm.done",
                    f"{r.norm} = {r.value!r}",
                    result=r.record(self.settings.float_digits),
                )
            self.ui.norm_results(results)
            self._require_exact(config, results)
            digits = self.settings.float_digits
            payload: dict[str, Any] = {"results": [r.record(digits) for r in results]}
            written = [
                tables.write_text(out / "result.json", tables.dumps_json(payload, config.header(), digits))
            ]
            if estimate is not None:
                if "csv" in config.formats:
                    written.append(
                        tables.write_text(
                            out / "samples.csv",
                            tables.samples_csv(estimate.samples, config.header(), digits),
                        )
                    )
                if "svg" in config.formats:
                    written.append(
                        tables.write_text(out / "samples.svg", svg.heatmap_svg(estimate.samples, "a(f) samples"))
                    )
            self._finish(log, run_dir, written)
            return results
        finally:
            log.close()

    def profile(self, config: RunConfig) -> list[ProfileRow]:
        run_dir, log, out = self._open(config)
        try:
            f, mu, facts = self.load_input(config)
            log.emit(Phase.BUILD.value, "input.ready", f"{f.node_count} nodes", data=facts)
            gamma2 = config.p if config.gamma2 is None else config.gamma2
            profile = build_profile(
                f,
                mu,
                config.kind,
                config.gamma1,
                gamma2,
                config.p,
                config.window,
                config.scope_cube,
                config.lattice,
                self.settings.max_cubes,
            )
            if not profile.complete and not config.allow_truncation:
                raise TruncationError(
                    f"the profile is only complete over {profile.window}; "
                    "pass --allow-truncation to accept it"
                )
            rows = profile_rows(profile, config.p, self.settings.max_tail_terms)
            log.emit(
                Phase.EVALUATE.value,
                "profile.done",
                f"{len(rows)} breakpoints",
                data={"families": len(profile.families), "divergence": profile.divergence is not None},
            )
            self.ui.profile_summary(rows, config.p)
            digits = self.settings.float_digits
            written = [
                tables.write_text(out / "profile.csv", tables.profile_csv(rows, config.header(), digits))
            ]
            if "svg" in config.formats:
                points = [(r.lam, r.lam_p_W) for r in rows]
                written.append(tables.write_text(out / "profile.svg", svg.loglog_svg(points, "λ-profile")))
            self._finish(log, run_dir, written)
            return rows
        finally:
            log.close()

    def verify(self, config: RunConfig) -> list[ClaimReport]:
        run_dir, log, out = self._open(config)
        try:
            claims = [c for c in config.claims if c in CLAIM_IDS]
            tags = [c for c in config.claims if c in THEOREM_TAGS]
            unknown = sorted(set(config.claims) - set(claims) - set(tags))
            if unknown:
                raise ParameterError(
                    f"unknown claims {unknown}; expected {', '.join(CLAIM_IDS + THEOREM_TAGS)}"
                )
            if not config.claims:
                claims = list(CLAIM_IDS)
            if config.theorems:
                tags = list(THEOREM_TAGS)
            jobs = claim_jobs(claims, self.settings) + theorem_jobs(
                tags, config.samples, config.seed, self.settings
            )
            reports = asyncio.run(run_suite(jobs, self.settings, log))
            self.ui.verdicts(reports)
            digits = self.settings.float_digits
            written = [
                tables.write_text(out / "report.json", tables.suite_json(reports, config.header(), digits))
            ]
            if "csv" in config.formats:
                for report in reports:
                    written.append(
                        tables.write_text(
                            out / f"claim-{report.claim}.csv",
                            tables.trend_csv(report, config.header(), digits),
                        )
                    )
            self._finish(log, run_dir, written)
            return reports
        finally:
            log.close()

    def example(self, config: RunConfig) -> dict[str, Any]:
        run_dir, log, out = self._open(config)
        try:
            if config.example is None:
                raise ParameterError("example needs an example id")
            built = build_example(config.example_spec())
            log.emit(Phase.BUILD.value, "example.built", built.spec.label, data=built.facts)
            self.ui.facts(built.spec.label, built.facts)
            digits = self.settings.float_digits
            written = [
                tables.write_text(
                    out / "facts.json",
                    tables.dumps_json({"facts": built.facts, "spec": built.spec.model_dump()}, config.header(), digits),
                )
            ]
            if built.function.tail is None:
                written.append(tables.write_text(out / f"{built.spec.id}.fn", dumps_function(built.function)))
            self._finish(log, run_dir, written)
            return built.facts
        finally:
            log.close()

    def sweep(self, config: RunConfig) -> list[dict[str, Any]]:
        """The configured norm across the truncations in ``values``."""
        run_dir, log, out = self._open(config)
        try:
            rows: list[dict[str, Any]] = []
            for t in config.values:
                f, mu, _ = self.load_input(config, truncation=t)
                results, _ = self._evaluate(config, f, mu)
                self._require_exact(config, results)
                for r in results:
                    rows.append({"truncation": t, "norm": r.norm, "value": r.value, "exactness": r.exactness})
                    log.emit(Phase.EVALUATE.value, "sweep.point", f"T={t}: {r.norm} = {r.value!r}")
            report = ClaimReport(claim=f"sweep-{config.example}", params=config.header(), series=rows)
            self.ui.facts("Sweep", {f"T={row['truncation']} {row['norm']}": row["value"] for row in rows})
            digits = self.settings.float_digits
            written = [
                tables.write_text(out / "sweep.csv", tables.trend_csv(report, config.header(), digits)),
            ]
            if "json" in config.formats:
                written.append(
                    tables.write_text(out / "sweep.json", tables.dumps_json({"rows": rows}, config.header(), digits))
                )
            if "svg" in config.formats:
                points = [(float(row["truncation"]), float(row["value"])) for row in rows]
                written.append(
                    tables.write_text(out / "sweep.svg", svg.loglog_svg(points, "sweep", "truncation", "norm"))
                )
            self._finish(log, run_dir, written)
            return rows
        finally:
            log.close()

    def decompose(self, config: RunConfig) -> dict[str, object]:
        from dyadnorm.decomp.chains import chain_oscillation_stats
        from dyadnorm.decomp.lerner import dumps_decomposition, lerner_decomposition

        run_dir, log, out = self._open(config)
        try:
            f, mu, _ = self.load_input(config)
            root = config.scope_cube or unit_cube(f.dimension)
            dec = lerner_decomposition(f, root, mu, self.settings)
            summary = dec.summary()
            log.emit(Phase.EVALUATE.value, "decomposition.done", f"{len(dec.generations)} generations", data=summary)
            if mu is None and config.p >= f.dimension:
                stats = chain_oscillation_stats(f, root, config.p, self.settings)
                summary["chains"] = stats.summary()
                log.emit(Phase.EVALUATE.value, "chains.done", "chain statistics", data=stats.summary())
            self.ui.facts("Decomposition", summary)
            written = [tables.write_text(out / "decomposition.txt", dumps_decomposition(dec))]
            if "json" in config.formats:
                written.append(
                    tables.write_text(
                        out / "decomposition.json",
                        tables.dumps_json({"summary": summary}, config.header(), self.settings.float_digits),
                    )
                )
            self._finish(log, run_dir, written)
            return summary
        finally:
            log.close()

    # ---- helpers ----------------------------------------------------------------------

    def _evaluate(self, config: RunConfig, f: StepFunction, mu: DyadicMeasure | None) -> tuple[list[NormResult], Any]:
        from dyadnorm.halfspace.estimate import continuous_weak_norm_bounds
        from dyadnorm.norms.garo import garo_dyadic
        from dyadnorm.norms.jn import jnp_dyadic
        from dyadnorm.norms.lebesgue import lp_norm, weak_lp_norm
        from dyadnorm.norms.weak import envelope_norm, lattice_norms, op_norm

        s = self.settings
        scope = config.scope_cube
        if config.norm == "op":
            return [
                op_norm(f, mu, config.p, config.gamma1, config.gamma2, config.kind, config.window, scope, config.lattice, s)
            ], None
        if config.norm == "lattices":
            return lattice_norms(f, mu, config.p, config.gamma1, config.gamma2, config.kind, config.window, settings=s), None
        if config.norm == "envelope":
            return [envelope_norm(f, mu, config.p, config.gamma1, config.window, scope, s)], None
        if config.norm == "lp":
            return [lp_norm(f, mu, config.p, scope)], None
        if config.norm == "weak_lp":
            return [weak_lp_norm(f, mu, config.p, scope)], None
        if config.norm == "jn":
            return [jnp_dyadic(f, scope, config.p, mu)], None
        if config.norm == "garo":
            return [garo_dyadic(f, scope or unit_cube(f.dimension), config.p, mu, settings=s)], None
        est = continuous_weak_norm_bounds(f, mu, config.p, config.gamma1, config.kind, window=config.window, settings=s)
        result = NormResult(
            norm="nu_gamma",
            value=est.sample_estimate,
            exactness="quadrature",
            details={"lower": est.lower, "upper": est.upper, "slack": est.slack, "levels": list(est.levels)},
        )
        return [result], est

    def _finish(self, log: EventLog, run_dir: RunDir, written: list[Path]) -> None:
        log.emit(
            Phase.EXPORT.value,
            "run.done",
            f"wrote {len(written)} files",
            data={"files": [str(p) for p in written], "run_dir": str(run_dir.path)},
        )
        self.ui.written(written)
