"""Tests for the claim checks and the randomized theorem sweeps."""

from __future__ import annotations

from fractions import Fraction

import pytest

from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.errors import ParameterError
from dyadnorm.verify.claims import (
    corner_lambda,
    product_constant,
    spike_series,
    survival_sums,
    verify_claim,
    with_truncation,
)
from dyadnorm.verify.report import ClaimReport
from dyadnorm.verify import theorems
from dyadnorm.verify.theorems import THEOREM_TAGS, run_theorem


class TestClaimReport:
    def test_verdict_follows_checks(self) -> None:
        report = ClaimReport(claim="x", checks={"a": True, "b": False})
        assert report.verdict == "inconsistent"
        assert not report.passed
        assert report.failed_checks() == ["b"]

    def test_all_checks_pass(self) -> None:
        report = ClaimReport(claim="x", checks={"a": True}, measured={"c": 1 / 3})
        assert report.verdict == "consistent"
        assert report.record(digits=3)["measured"]["c"] == "0.333"


class TestClaimHelpers:
    def test_spike_series(self) -> None:
        assert spike_series(2, 1) == 2
        assert spike_series(2, 2) == Fraction(9, 4)

    def test_survival_sums(self) -> None:
        assert survival_sums([0.5, 0.5]) == pytest.approx([0.5, 0.75])

    def test_product_constant(self) -> None:
        assert product_constant() == pytest.approx(0.288788095, rel=1e-8)

    def test_corner_lambda(self) -> None:
        assert corner_lambda(1, 2.0) == pytest.approx(0.25 * (2**0.5 - 1) / 4)

    def test_with_truncation_revalidates(self) -> None:
        assert with_truncation(ExampleSpec(id="E1"), 3).truncation == 3
        with pytest.raises(ValueError, match="at most 6"):
            with_truncation(ExampleSpec(id="E1"), 9)


class TestVerifyClaim:
    def test_indicator_has_infinite_norm(self, settings: DyadnormSettings) -> None:
        report = verify_claim(1, ExampleSpec(id="E0"), settings=settings)
        assert report.checks == {"a_norm_infinite": True, "divergence_witness": True}
        assert report.verdict == "consistent"

    def test_spike_series(self, settings: DyadnormSettings) -> None:
        report = verify_claim("1", ExampleSpec(id="E1", truncation=2), settings=settings)
        assert report.checks["exact_series_at_least_n"]
        assert report.checks["last_series_is_spine"]
        assert report.checks["l1_matches_sum"]
        assert [row["n"] for row in report.series] == [1, 2]

    def test_claim2_jn_grows_while_b_stays_bounded(self) -> None:
        report = verify_claim("2")
        assert report.checks == {"b_norm_finite": True, "b_norm_stable": True, "jn_grows": True}
        assert report.verdict == "consistent"
        assert report.measured["jn_last"] > report.measured["jn_first"]

    def test_claim3_corner_tower(self) -> None:
        report = verify_claim("3")
        assert report.checks["jn_converges"]
        assert report.checks["corner_b_above_lambda"]
        assert report.checks["self_similar_b_norm_infinite"]
        assert report.checks["b_norm_grows"]
        assert report.verdict == "consistent"
        assert [row["K"] for row in report.series] == [6, 10, 14]

    def test_claim4_per_level_bounds(self) -> None:
        report = verify_claim("4")
        assert report.checks == {
            "b_norm_bounded": True,
            "a_quantity_bounded": True,
            "level_set_covers_intervals": True,
            "level_set_grows": True,
        }
        assert report.verdict == "consistent"
        for row in report.series:
            assert row["level_set"] >= row["level_set_bound"] * (1 - 1e-9)
        assert report.measured["b_ratio"] <= 2

    def test_unknown_claim(self) -> None:
        with pytest.raises(ParameterError, match="unknown claim"):
            verify_claim("5")

    def test_example_must_match_claim(self) -> None:
        with pytest.raises(ParameterError, match="checked on E3"):
            verify_claim("2", ExampleSpec(id="E0"))

    def test_truncations_positive(self) -> None:
        with pytest.raises(ParameterError, match="positive"):
            verify_claim("1", ExampleSpec(id="E2"), truncations=[0, 1])

    def test_q_range(self) -> None:
        with pytest.raises(ParameterError, match="q must lie"):
            verify_claim("4", q=1.0)


class TestTheorems:
    def test_tags(self) -> None:
        assert "halfspace-bracket" in THEOREM_TAGS
        assert len(set(THEOREM_TAGS)) == len(THEOREM_TAGS)

    def test_unknown_tag(self) -> None:
        with pytest.raises(ParameterError, match="unknown theorem tag"):
            run_theorem("bmo")

    def test_samples_positive(self) -> None:
        with pytest.raises(ParameterError, match="samples must be positive"):
            run_theorem("embedding-mean", samples=0)

    def test_sweep_records_parameters(self, settings: DyadnormSettings) -> None:
        report = run_theorem("embedding-mean", samples=2, seed=3, settings=settings)
        assert report.claim == "embedding-mean"
        assert report.params["samples"] == 2
        assert report.params["seed"] == 3
        assert set(report.checks) == {
            "gamma_negative_bounded",
            "gamma_above_ahlfors_bounded",
            "gamma_positive_p_above_one_bounded",
        }

    def test_sweeps_are_seeded(self, settings: DyadnormSettings) -> None:
        first = run_theorem("envelope-lp", samples=2, seed=1, settings=settings)
        second = run_theorem("envelope-lp", samples=2, seed=1, settings=settings)
        assert first.measured == second.measured

    def test_gfunction_sweep(self, settings: DyadnormSettings) -> None:
        report = run_theorem("gfunction", samples=3, seed=2, settings=settings)
        assert set(report.checks) == {
            "gamma_negative_bounded",
            "gamma_positive_bounded",
            "gamma_positive_weighted_bounded",
            "rectangles_bounded",
        }
        assert report.verdict == "consistent"
        assert [row["regime"] for row in report.series][-1] == "rectangles"

    def test_suite_runs_every_tag_in_order(
        self, monkeypatch: pytest.MonkeyPatch, settings: DyadnormSettings
    ) -> None:
        seen: list[tuple[str, int | None, int]] = []

        def fake(
            tag: str, samples: int | None = None, seed: int = 0, settings: object = None
        ) -> ClaimReport:
            seen.append((tag, samples, seed))
            return ClaimReport(claim=tag)

        monkeypatch.setattr(theorems, "run_theorem", fake)
        reports = theorems.theorem_suite(samples=1, seed=4, settings=settings)
        assert [r.claim for r in reports] == list(THEOREM_TAGS)
        assert seen[0] == ("weak-poincare", 1, 4)

    def test_weak_poincare_checks_depth_drift(self, settings: DyadnormSettings) -> None:
        report = run_theorem("weak-poincare", samples=2, seed=5, settings=settings)
        assert set(report.checks) == {"constant_bounded", "depth_drift_below_10pct"}
        drift = report.measured["depth_drift"]
        assert report.checks["depth_drift_below_10pct"] == (drift < theorems.MAX_DRIFT)
        assert [row["depth"] for row in report.series] == [5, 6]

    def test_drift_above_bound_fails_the_sweep(
        self, monkeypatch: pytest.MonkeyPatch, settings: DyadnormSettings
    ) -> None:
        ratios = iter([1.0, 1.5])
        monkeypatch.setattr(theorems, "_ratio", lambda numerator, denominator: next(ratios, 2.0))
        report = run_theorem("weak-poincare", samples=1, seed=0, settings=settings)
        assert not report.checks["depth_drift_below_10pct"]
        assert report.verdict == "inconsistent"

    def test_biparam_runs_nested_windows(self, settings: DyadnormSettings) -> None:
        report = run_theorem("biparam", samples=2, seed=1, settings=settings)
        windows = report.params["windows"]
        assert windows == ["[-3, 1]", "[-4, 2]", "[-5, 3]"]
        assert len(report.series) == 4 * len(windows)
        key = "alpha=1,beta=0,alpha2=0,beta2=1"
        assert f"{key}_window_drift_below_10pct" in report.checks
        ratios = [row["max_ratio"] for row in report.series if row["exponents"] == key]
        assert ratios == pytest.approx(sorted(ratios))
        drift = report.measured[f"{key}_window_drift"]
        assert drift == pytest.approx(ratios[2] / ratios[1] - 1)
