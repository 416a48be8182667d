"""Tests for the weak-type, Lebesgue, JN_p, GaRo_p and bi-parameter norms."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator

import numpy as np
import pytest

from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.dyadic.collection import CubeCollection
from dyadnorm.dyadic.cube import DyadicCube, unit_cube
from dyadnorm.dyadic.rectangle import DyadicRectangle
from dyadnorm.errors import ParameterError
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.biparam import biparam_weak_norm
from dyadnorm.norms.garo import garo_dyadic
from dyadnorm.norms.gfunction import gfunction_check, rectangle_gfunction_check
from dyadnorm.norms.jn import jnp_dyadic
from dyadnorm.norms.lebesgue import lp_norm, weak_lp_norm
from dyadnorm.norms.results import NormResult, format_float
from dyadnorm.norms.weak import envelope_norm, lattice_norms, op_norm
from dyadnorm.profile.build import build_osc_profile
from dyadnorm.profile.evaluate import profile_sup
from dyadnorm.profile.models import LevelWindow
from dyadnorm.verify.generators import random_grid_function, random_tree_function


def _subcubes(root: DyadicCube, finest: int) -> Iterator[DyadicCube]:
    stack = [root]
    while stack:
        cube = stack.pop()
        yield cube
        if cube.level > finest:
            stack.extend(cube.children())


def _brute_osc_norm(f: StepFunction, root: DyadicCube, p: float, gamma1: float, gamma2: float) -> float:
    field = Field(f)
    n = f.dimension
    weights: dict[float, float] = {}
    for q in _subcubes(root, f.finest_level):
        value = 2.0 ** (q.level * gamma1 / p) * field.oscillation(q)
        if value > 0:
            weights[value] = weights.get(value, 0.0) + 2.0 ** (q.level * (n - gamma2))
    best, running = 0.0, 0.0
    for value in sorted(weights, reverse=True):
        running += weights[value]
        best = max(best, value**p * running)
    return best ** (1.0 / p)


def _brute_jn(field: Field, cube: DyadicCube, p: float, finest: int) -> float:
    own = float(cube.volume) * field.oscillation(cube) ** p
    if cube.level <= finest:
        return own
    return max(own, sum(_brute_jn(field, c, p, finest) for c in cube.children()))


def _antichains(cube: DyadicCube, finest: int) -> list[list[DyadicCube]]:
    out = [[cube]]
    if cube.level > finest:
        below = [[[]] + _antichains(c, finest) for c in cube.children()]
        out.extend([q for part in combo for q in part] for combo in itertools.product(*below))
    return out


def _brute_garo(f: StepFunction, root: DyadicCube, p: float) -> float:
    field = Field(f)
    p_prime = p / (p - 1.0)
    best = 0.0
    for chain in _antichains(root, f.finest_level):
        area = sum(float(q.volume) for q in chain)
        value = sum(float(q.volume) * field.oscillation(q) for q in chain)
        if area > 0:
            best = max(best, value / area ** (1.0 / p_prime))
    return best


class TestNormResult:
    def test_infinite_record(self) -> None:
        r = NormResult(norm="O^p", value=math.inf, details={"lower": 0.5})
        assert r.is_infinite
        rec = r.record(digits=6)
        assert rec["value"] == "+inf"
        assert rec["details"] == {"lower": "0.5"}

    def test_format_float(self) -> None:
        assert format_float(1 / 3, 4) == "0.3333"
        assert format_float(-math.inf) == "-inf"
        assert format_float(math.nan) == "nan"


class TestLebesgue:
    def test_lp(self, staircase: StepFunction) -> None:
        assert lp_norm(staircase, p=1).value == pytest.approx(1.25)
        assert lp_norm(staircase, p=2).value == pytest.approx(math.sqrt(2.75))

    def test_weak_lp(self, staircase: StepFunction) -> None:
        result = weak_lp_norm(staircase, p=1)
        assert result.value == pytest.approx(0.75)
        assert result.witness == ["v=1.0"]

    def test_centered_on_a_cube(self, staircase: StepFunction) -> None:
        result = weak_lp_norm(staircase, p=1, scope=unit_cube(1), centered=True)
        assert result.value == pytest.approx(0.625)
        assert result.details["centered"] is True

    def test_constant_outside_value_is_infinite(self) -> None:
        assert lp_norm(StepFunction.constant(1.0, 1), p=2).is_infinite

    def test_centering_needs_scope(self, staircase: StepFunction) -> None:
        with pytest.raises(ParameterError, match="scope"):
            lp_norm(staircase, p=1, centered=True)

    def test_weighted(self, staircase: StepFunction) -> None:
        mu = DyadicMeasure.from_densities([(DyadicCube(0, -1, (0,)), 3.0)], dimension=1)
        # 1 on mass 3/2, 3 on mass 1/4
        assert lp_norm(staircase, mu, 1).value == pytest.approx(2.25)


class TestWeakTypeNorms:
    def test_scoped_staircase(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = op_norm(staircase, p=1.0, scope=unit_cube(1), settings=settings)
        assert result.value == pytest.approx(1.75)
        assert result.exactness == "exact"
        assert result.details["scope"] == "L0:k0:(0)"

    @pytest.mark.parametrize(("p", "gamma1"), [(1.0, 0.0), (2.0, 0.0), (1.5, 1.0), (2.0, -0.5)])
    def test_scoped_matches_enumeration_on_the_line(
        self, rng: np.random.Generator, settings: DyadnormSettings, p: float, gamma1: float
    ) -> None:
        root = unit_cube(1)
        for _ in range(5):
            f = random_tree_function(rng, 1, 4)
            got = op_norm(f, None, p, gamma1, p, "osc", scope=root, settings=settings).value
            assert got == pytest.approx(_brute_osc_norm(f, root, p, gamma1, p), rel=1e-9)

    def test_scoped_matches_enumeration_in_the_plane(
        self, rng: np.random.Generator, settings: DyadnormSettings
    ) -> None:
        root = unit_cube(2)
        for _ in range(3):
            f = random_grid_function(rng, 2, 2)
            got = op_norm(f, None, 2.0, 0.0, 1.0, "osc", scope=root, settings=settings).value
            assert got == pytest.approx(_brute_osc_norm(f, root, 2.0, 0.0, 1.0), rel=1e-9)

    def test_full_lattice_dominates_scope(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        full = op_norm(staircase, p=1.0, settings=settings)
        assert math.isfinite(full.value)
        assert full.value >= 1.75 - 1e-12

    def test_nonzero_outside_mean_diverges(self, settings: DyadnormSettings) -> None:
        result = op_norm(StepFunction.constant(1.0, 1), kind="mean", settings=settings)
        assert result.is_infinite
        assert "divergence" in result.details

    def test_window_is_reported(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = op_norm(staircase, p=1.0, window=LevelWindow(-1, 0), settings=settings)
        assert result.details["window"] == "[-1, 0]"

    def test_one_result_per_lattice(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        results = lattice_norms(staircase, p=1.0, settings=settings)
        assert [r.details["lattice"] for r in results] == [0, 1, 2]
        assert results[0].value == pytest.approx(op_norm(staircase, p=1.0, settings=settings).value)

    def test_bad_lattice(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        with pytest.raises(ParameterError):
            op_norm(staircase, p=1.0, lattice=7, settings=settings)

    def test_heaviside_oscillations_vanish_inside_the_window(
        self, settings: DyadnormSettings
    ) -> None:
        # χ_[0,8): intervals no longer than 4 never straddle 0 or 8
        step = StepFunction.indicator(DyadicCube(0, 3, (0,)))
        window = LevelWindow(None, 2)
        windowed = op_norm(step, None, 1.0, 0.5, 0.5, "osc", window, settings=settings)
        assert windowed.value == 0.0
        profile = build_osc_profile(step, None, 0.5, 0.5, 1.0, window)
        assert profile_sup(profile, 1.0) == 0.0
        full = op_norm(step, None, 1.0, 0.5, 0.5, "osc", settings=settings)
        assert full.value > 0.0

    def test_oscillation_ignores_added_constants(
        self, rng: np.random.Generator, settings: DyadnormSettings
    ) -> None:
        for _ in range(3):
            f = random_tree_function(rng, 1, 4)
            c = float(rng.uniform(-5.0, 5.0))
            for scope in (unit_cube(1), None):
                base = op_norm(f, None, 2.0, 0.5, 1.0, "osc", scope=scope, settings=settings)
                moved = op_norm(f.shifted(c), None, 2.0, 0.5, 1.0, "osc", scope=scope, settings=settings)
                assert moved.value == pytest.approx(base.value, rel=1e-9)

    @pytest.mark.parametrize("kind", ["osc", "mean"])
    def test_scaling_is_homogeneous(
        self, rng: np.random.Generator, settings: DyadnormSettings, kind: str
    ) -> None:
        for c in (-3.0, 0.25, 7.5):
            f = random_tree_function(rng, 1, 4)
            base = op_norm(f, None, 1.5, 0.5, 1.0, kind, settings=settings)  # type: ignore[arg-type]
            scaled = op_norm(f.scaled(c), None, 1.5, 0.5, 1.0, kind, settings=settings)  # type: ignore[arg-type]
            assert scaled.value == pytest.approx(abs(c) * base.value, rel=1e-9)


class TestEnvelope:
    def test_positive_gamma_reads_small_lambda(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = envelope_norm(staircase, p=1.0, gamma=0.5, settings=settings)
        assert result.details["side"] == "liminf_zero"
        assert 0 < result.value < math.inf

    def test_negative_gamma_reads_large_lambda(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = envelope_norm(staircase, p=1.0, gamma=-1.0, settings=settings)
        assert result.details["side"] == "limsup_infinity"
        assert math.isfinite(result.value)

    def test_gamma_zero(self, staircase: StepFunction) -> None:
        with pytest.raises(ParameterError, match="γ != 0"):
            envelope_norm(staircase, gamma=0.0)


class TestJohnNirenberg:
    def test_staircase(self, staircase: StepFunction) -> None:
        result = jnp_dyadic(staircase, unit_cube(1), 2.0)
        assert result.value == pytest.approx(math.sqrt(1.125))
        assert result.witness == ["L0:k-1:(1)"]

    def test_matches_recursion(self, rng: np.random.Generator) -> None:
        root = unit_cube(1)
        for _ in range(5):
            f = random_tree_function(rng, 1, 4)
            expected = _brute_jn(Field(f), root, 1.5, f.finest_level) ** (1 / 1.5)
            assert jnp_dyadic(f, root, 1.5).value == pytest.approx(expected, rel=1e-9)

    def test_needs_p_above_one(self, staircase: StepFunction) -> None:
        with pytest.raises(ParameterError, match="p > 1"):
            jnp_dyadic(staircase, unit_cube(1), 1.0)

    def test_whole_lattice(self, staircase: StepFunction) -> None:
        result = jnp_dyadic(staircase, None, 2.0)
        assert result.value >= math.sqrt(1.125) - 1e-12
        assert math.isfinite(result.value)


class TestGarsiaRodemich:
    def test_staircase(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = garo_dyadic(staircase, unit_cube(1), 2.0, settings=settings)
        assert result.value == pytest.approx(0.75 * math.sqrt(2))
        assert result.value <= result.details["jnp"] * (1 + 1e-9)

    def test_matches_antichain_enumeration(self, rng: np.random.Generator, settings: DyadnormSettings) -> None:
        root = unit_cube(1)
        for _ in range(4):
            f = random_tree_function(rng, 1, 3)
            expected = _brute_garo(f, root, 2.0)
            assert garo_dyadic(f, root, 2.0, settings=settings).value == pytest.approx(expected, rel=1e-9)

    def test_coarse_level_brackets(self, staircase: StepFunction, settings: DyadnormSettings) -> None:
        result = garo_dyadic(staircase, unit_cube(1), 2.0, coarse_level=-1, settings=settings)
        assert result.exactness == "truncated"
        assert result.details["lower"] <= result.details["upper"] * (1 + 1e-9)

    def test_needs_p_above_one(self, staircase: StepFunction) -> None:
        with pytest.raises(ParameterError, match="p > 1"):
            garo_dyadic(staircase, unit_cube(1), 1.0)


class TestGFunction:
    def test_single_cube(self) -> None:
        check = gfunction_check(CubeCollection.from_cubes([unit_cube(1)]), 1.0, 2.0)
        assert check.ratio == pytest.approx(1.0)

    def test_nested_cubes(self) -> None:
        cubes = CubeCollection.from_cubes([unit_cube(1), DyadicCube(0, -1, (0,))])
        check = gfunction_check(cubes, 1.0, 2.0)
        assert check.lhs == pytest.approx(math.sqrt(2 + math.sqrt(2)))
        assert check.rhs == pytest.approx(math.sqrt(2))
        assert check.generations == 2

    def test_q_above_one(self) -> None:
        with pytest.raises(ParameterError, match="q must exceed 1"):
            gfunction_check(CubeCollection.from_cubes([unit_cube(1)]), 1.0, 1.0)

    def test_rectangle_variant(self) -> None:
        rect = DyadicRectangle(unit_cube(1), DyadicCube(0, -1, (0,)))
        check = rectangle_gfunction_check([rect], 1.0, 2.0, 0.0, 1.0, 0.5, 0.5)
        assert check.lhs == pytest.approx(2**-0.5)
        assert check.rhs == pytest.approx(2**-0.25)

    def test_rectangle_exponents(self) -> None:
        rect = DyadicRectangle(unit_cube(1), unit_cube(1))
        with pytest.raises(ParameterError, match="0 < ε' < ε"):
            rectangle_gfunction_check([rect], 1.0, 2.0, 0.5, 0.5, 0.25, 0.75)


class TestBiparam:
    def test_unit_square(self, settings: DyadnormSettings) -> None:
        f = StepFunction.indicator(unit_cube(2))
        result = biparam_weak_norm(f, 1, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5, LevelWindow(-1, 0), settings=settings)
        assert result.value == pytest.approx(1 + 2**-0.5)
        assert result.exactness == "truncated"
        assert result.details["split"] == [1, 1]

    def test_squares_only_is_the_cube_norm(self, settings: DyadnormSettings) -> None:
        f = StepFunction.indicator(unit_cube(2))
        window = LevelWindow(-2, 0)
        squares = biparam_weak_norm(
            f, 1, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5, window, squares_only=True, settings=settings
        )
        cubes = op_norm(f, None, 2.0, 1.0, 1.0, "mean", window, settings=settings)
        assert squares.value == cubes.value
        assert squares.details["squares_only"] is True

    def test_beta_must_be_nonpositive(self) -> None:
        f = StepFunction.indicator(unit_cube(2))
        with pytest.raises(ParameterError, match="β must be <= 0"):
            biparam_weak_norm(f, 1, 2.0, 1.0, 0.5, 0.5, 0.5, 0.5, LevelWindow(-1, 0))

    def test_needs_closed_window(self, settings: DyadnormSettings) -> None:
        f = StepFunction.indicator(unit_cube(2))
        with pytest.raises(ParameterError, match="closed level window"):
            biparam_weak_norm(f, 1, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5, LevelWindow(None, 0), settings=settings)

    def test_lebesgue_only(self) -> None:
        f = StepFunction.indicator(unit_cube(2))
        mu = DyadicMeasure.from_densities([(unit_cube(2), 2.0)], dimension=2)
        with pytest.raises(ParameterError, match="Lebesgue"):
            biparam_weak_norm(f, 1, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5, LevelWindow(-1, 0), mu)

    def test_window_enlargement_only_grows(
        self, rng: np.random.Generator, settings: DyadnormSettings
    ) -> None:
        windows = [LevelWindow(-1, 0), LevelWindow(-2, 1), LevelWindow(-3, 2)]
        for _ in range(3):
            f = random_grid_function(rng, 2, 2)
            values = [
                biparam_weak_norm(f, 1, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5, w, settings=settings).value
                for w in windows
            ]
            assert values == pytest.approx(sorted(values))
