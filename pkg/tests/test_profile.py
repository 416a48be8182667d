"""Tests for λ-profiles: windows, tail families, suprema and envelopes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from dyadnorm.dyadic.cube import DyadicCube, unit_cube
from dyadnorm.errors import ParameterError
from dyadnorm.function.step import StepFunction
from dyadnorm.profile.build import build_mean_profile, build_osc_profile, build_profile
from dyadnorm.profile.evaluate import (
    classify_family,
    disjoint_level_sup,
    profile_envelopes,
    profile_rows,
    profile_sup,
    sup_location,
)
from dyadnorm.profile.models import (
    DivergenceWitness,
    FamilyKind,
    LambdaProfile,
    LevelWindow,
    TailFamily,
    merge_profiles,
)
from dyadnorm.verify.generators import random_profile, random_tree_function


def _family(value_ratio: float, weight_ratio: float, steps: int | None = None) -> TailFamily:
    return TailFamily(
        kind=FamilyKind.INTERIOR,
        a0=1.0,
        value_ratio=value_ratio,
        terms=((1.0, weight_ratio),),
        origin_level=0,
        steps=steps,
    )


class TestLevelWindow:
    def test_contains(self) -> None:
        window = LevelWindow(-2, 1)
        assert window.contains(-2)
        assert window.contains(1)
        assert not window.contains(2)
        assert str(window) == "[-2, 1]"

    def test_open_sides(self) -> None:
        assert LevelWindow().is_open
        assert str(LevelWindow(None, 3)) == "[-inf, 3]"
        assert LevelWindow(None, 3).contains(-1000)

    def test_empty_window(self) -> None:
        with pytest.raises(ParameterError, match="exceeds"):
            LevelWindow(2, 1)


class TestTailFamily:
    def test_values_and_weights(self) -> None:
        fam = _family(0.5, 2.0)
        assert fam.value(3) == 0.125
        assert fam.weight(3) == 8.0
        assert fam.level(3) == -3

    def test_qualifying_steps(self) -> None:
        fam = _family(0.5, 2.0)
        assert fam.qualifying(0.2) == (0, 3)
        assert fam.weight_above(0.2) == pytest.approx(7.0)

    def test_weight_sums(self) -> None:
        assert _family(0.5, 2.0).weight_sum(0, None) == math.inf
        assert _family(0.5, 2.0, steps=2).weight_sum(0, None) == pytest.approx(3.0)
        assert _family(0.5, 0.5).weight_sum(1, None) == pytest.approx(1.0)

    def test_base_value_positive(self) -> None:
        with pytest.raises(ParameterError, match="positive"):
            TailFamily(FamilyKind.INTERIOR, 0.0, 0.5, ((1.0, 1.0),), 0)


class TestClassifyFamily:
    def test_critical_at_zero(self) -> None:
        regime = classify_family(_family(0.5, 2.0), 1.0)
        assert regime.regime == "critical_zero"
        assert regime.sup_limit == pytest.approx(2.0)
        assert regime.liminf_zero == pytest.approx(1.0)

    def test_critical_at_infinity(self) -> None:
        regime = classify_family(_family(2.0, 0.5), 1.0)
        assert regime.regime == "critical_infinity"
        assert regime.limsup_infinity == pytest.approx(2.0)

    def test_bounded_and_divergent(self) -> None:
        assert classify_family(_family(0.5, 2.0), 2.0).regime == "bounded"
        assert classify_family(_family(0.5, 4.0), 1.0).regime == "divergent_zero"
        assert classify_family(_family(1.0, 1.0), 1.0).regime == "divergent"
        assert classify_family(_family(0.5, 2.0, steps=4), 1.0).regime == "bounded"


class TestLambdaProfile:
    @pytest.fixture
    def profile(self) -> LambdaProfile:
        return LambdaProfile.from_entries([(1.0, 1.0), (2.0, 0.5), (1.0, 0.5)])

    def test_merges_equal_values(self, profile: LambdaProfile) -> None:
        assert profile.steps == [(1.0, 1.5), (2.0, 0.5)]

    def test_w(self, profile: LambdaProfile) -> None:
        assert profile.W(1.5) == pytest.approx(0.5)
        assert profile.W(0.5) == pytest.approx(2.0)
        assert profile.W(3.0) == 0.0
        with pytest.raises(ParameterError, match="positive"):
            profile.W(0.0)

    def test_sup(self, profile: LambdaProfile) -> None:
        assert profile_sup(profile, 1.0) == pytest.approx(2.0)
        assert sup_location(profile, 1.0) == 1.0
        assert profile_sup(profile, 2.0) == pytest.approx(2.0)

    def test_rows(self, profile: LambdaProfile) -> None:
        rows = profile_rows(profile, 1.0)
        assert [(r.lam, r.W, r.lam_p_W, r.source) for r in rows] == [
            (2.0, 0.5, 1.0, "step"),
            (1.0, 2.0, 2.0, "step"),
        ]

    def test_divergence(self) -> None:
        profile = LambdaProfile(divergence=DivergenceWitness("every level", lower_value=1.0))
        assert profile.W(0.5) == math.inf
        assert profile_sup(profile, 1.0) == math.inf

    def test_family_sup_and_envelopes(self) -> None:
        profile = LambdaProfile(families=(_family(0.5, 2.0),))
        assert profile_sup(profile, 1.0) == pytest.approx(2.0)
        env = profile_envelopes(profile, 1.0)
        assert env.liminf_zero == pytest.approx(1.0)
        assert env.limsup_infinity == 0.0
        assert not env.truncated

    def test_rows_mark_tails(self) -> None:
        rows = profile_rows(LambdaProfile(families=(_family(0.5, 2.0, steps=3),)), 1.0)
        assert [r.source for r in rows] == ["tail"] * 3

    def test_merge_keeps_flags(self, profile: LambdaProfile) -> None:
        partial = LambdaProfile.from_entries([(4.0, 0.25)], window=LevelWindow(-1, 0), complete=False)
        merged = merge_profiles([profile, partial])
        assert not merged.complete
        assert merged.W(3.0) == pytest.approx(0.25)
        assert merged.window.is_open

    def test_sup_bounds_every_sample(self, rng: np.random.Generator) -> None:
        profile = random_profile(rng, 40)
        sup = profile_sup(profile, 1.5)
        for lam in 10.0 ** rng.uniform(-7, 7, size=50):
            assert lam**1.5 * profile.W(float(lam)) <= sup * (1 + 1e-12)


class TestBuildProfile:
    def test_scoped_staircase(self, staircase: StepFunction) -> None:
        profile = build_profile(staircase, None, "osc", 0.0, 1.0, 1.0, scope=unit_cube(1))
        assert profile.complete
        assert profile.values.tolist() == pytest.approx([0.875, 1.5])
        assert profile.weights.tolist() == pytest.approx([1.0, 1.0])

    def test_window_truncates(self, staircase: StepFunction) -> None:
        profile = build_profile(staircase, None, "osc", 0.0, 1.0, 1.0, LevelWindow(0, 0), unit_cube(1))
        assert not profile.complete
        assert profile.values.tolist() == pytest.approx([0.875])
        assert any("descent stopped" in note for note in profile.notes)

    def test_mean_profile_below_leaves(self) -> None:
        f = StepFunction.indicator(unit_cube(1))
        profile = build_profile(f, None, "mean", 0.5, 0.5, 1.0, scope=unit_cube(1))
        assert profile.steps == [(1.0, 1.0)]
        assert [fam.kind for fam in profile.families] == [FamilyKind.BELOW_LEAF_MEAN]

    def test_kind_shortcuts(self, staircase: StepFunction) -> None:
        osc = build_osc_profile(staircase, None, 0.0, 1.0, 1.0, scope=unit_cube(1))
        assert osc.values.tolist() == pytest.approx([0.875, 1.5])
        f = StepFunction.indicator(unit_cube(1))
        mean = build_mean_profile(f, None, 0.5, 0.5, 1.0, scope=unit_cube(1))
        assert mean.steps == [(1.0, 1.0)]

    def test_window_enlargement_only_grows(self, rng: np.random.Generator) -> None:
        for _ in range(3):
            f = random_tree_function(rng, 1, 5)
            sups = [
                profile_sup(build_profile(f, None, "osc", 0.0, 1.0, 2.0, window, unit_cube(1)), 2.0)
                for window in (LevelWindow(0, 0), LevelWindow(-2, 0), LevelWindow(-4, 0), LevelWindow())
            ]
            assert sups == pytest.approx(sorted(sups))

    def test_merge_dominates_parts(self, rng: np.random.Generator) -> None:
        for _ in range(10):
            first, second = random_profile(rng, 15), random_profile(rng, 15)
            merged = profile_sup(merge_profiles([first, second]), 1.5)
            assert merged >= max(profile_sup(first, 1.5), profile_sup(second, 1.5)) * (1 - 1e-12)

    def test_bad_kind(self, staircase: StepFunction) -> None:
        with pytest.raises(ParameterError, match="kind"):
            build_profile(staircase, None, "median", 0.0, 1.0, 1.0)  # type: ignore[arg-type]


class TestDisjointLevelSup:
    @pytest.fixture
    def cubes(self) -> dict[DyadicCube, tuple[float, float]]:
        root = unit_cube(1)
        return {root: (1.0, 1.0), root.child(0): (2.0, 0.4), root.child(1): (2.0, 0.4)}

    def test_prefers_the_heavier_antichain(self, cubes: dict[DyadicCube, tuple[float, float]]) -> None:
        total, witness = disjoint_level_sup(cubes, 0.5)
        assert total == pytest.approx(1.0)
        assert witness == [unit_cube(1)]

    def test_high_threshold_keeps_children(self, cubes: dict[DyadicCube, tuple[float, float]]) -> None:
        total, witness = disjoint_level_sup(cubes, 1.5)
        assert total == pytest.approx(0.8)
        assert len(witness) == 2

    @staticmethod
    def _tree(depth: int) -> list[DyadicCube]:
        level = [unit_cube(1)]
        cubes = list(level)
        for _ in range(depth):
            level = [c for q in level for c in q.children()]
            cubes.extend(level)
        return cubes

    @staticmethod
    def _exhaustive(cubes: dict[DyadicCube, tuple[float, float]], lam: float) -> float:
        qualifying = [q for q, (value, _) in cubes.items() if abs(value) > lam]
        clash = [
            sum(1 << j for j, r in enumerate(qualifying) if j != i and (q.contains(r) or r.contains(q)))
            for i, q in enumerate(qualifying)
        ]
        best = 0.0
        for mask in range(1 << len(qualifying)):
            members = [i for i in range(len(qualifying)) if mask >> i & 1]
            if any(clash[i] & mask for i in members):
                continue
            best = max(best, sum(cubes[qualifying[i]][1] for i in members))
        return best

    def test_matches_exhaustive_antichains(self, rng: np.random.Generator) -> None:
        tree = self._tree(3)
        assert len(tree) == 15
        for _ in range(4):
            values = rng.uniform(0.0, 2.0, size=len(tree))
            weights = rng.uniform(0.1, 1.0, size=len(tree))
            cubes = {q: (float(v), float(w)) for q, v, w in zip(tree, values, weights, strict=True)}
            for lam in (0.5, 1.2):
                total, witness = disjoint_level_sup(cubes, lam)
                assert total == pytest.approx(self._exhaustive(cubes, lam))
                assert sum(cubes[q][1] for q in witness) == pytest.approx(total)
                assert all(abs(cubes[q][0]) > lam for q in witness)
                assert not any(a != b and a.contains(b) for a in witness for b in witness)

    def test_full_sum_within_geometric_constant(self, rng: np.random.Generator) -> None:
        gamma = -1.0
        constant = 1 / (1 - 2**gamma)
        tree = self._tree(3)
        for _ in range(20):
            values = rng.uniform(0.0, 2.0, size=len(tree))
            # weight ℓ(Q)^{-γ} |Q|
            cubes = {q: (float(v), q.side ** (1 - gamma)) for q, v in zip(tree, values, strict=True)}
            lam = float(rng.uniform(0.0, 1.5))
            full = sum(w for v, w in cubes.values() if abs(v) > lam)
            total, _ = disjoint_level_sup(cubes, lam)
            assert total <= full * (1 + 1e-12)
            assert full <= constant * total * (1 + 1e-12)
