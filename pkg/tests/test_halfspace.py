"""Tests for Carleson boxes, the half-space bracket and the Sobolev-side check."""

from __future__ import annotations

import math

import pytest

from dyadnorm.config.settings import DyadnormSettings
from dyadnorm.dyadic.cube import DyadicCube, unit_cube
from dyadnorm.errors import ParameterError
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.halfspace.boxes import (
    CarlesonBox,
    carleson_tiling_check,
    height_integral,
    nu_gamma_box,
    nu_gamma_box_quadrature,
)
from dyadnorm.halfspace.estimate import bracket_slack, continuous_weak_norm_bounds, sample_levels
from dyadnorm.halfspace.sobolev import sobolev_side_check_1d
from dyadnorm.profile.models import LevelWindow

HALF = DyadicCube(0, -1, (0,))


class TestCarlesonBoxes:
    def test_box_mass(self) -> None:
        assert nu_gamma_box(unit_cube(1), 1.0) == pytest.approx(0.5)
        assert nu_gamma_box(unit_cube(1), -1.0) == pytest.approx(1.0)
        assert nu_gamma_box(HALF, 1.0) == pytest.approx(0.5)

    def test_weighted_box_mass(self) -> None:
        mu = DyadicMeasure.from_densities([(HALF, 3.0)], dimension=1)
        assert nu_gamma_box(unit_cube(1), 1.0, mu) == pytest.approx(1.0)

    @pytest.mark.parametrize("gamma", [-1.5, -0.25, 0.5, 2.0])
    def test_quadrature_matches_closed_form(self, gamma: float) -> None:
        cube = DyadicCube(0, -3, (5,))
        assert nu_gamma_box_quadrature(cube, gamma) == pytest.approx(nu_gamma_box(cube, gamma), rel=1e-10)

    def test_log_height_at_zero(self) -> None:
        assert height_integral(1.0, 2.0, 0.0) == pytest.approx(math.log(2.0))
        with pytest.raises(ParameterError, match="γ != 0"):
            nu_gamma_box(unit_cube(1), 0.0)

    def test_box_membership(self) -> None:
        box = CarlesonBox(HALF)
        assert box.contains((0.25,), 1.0)
        assert not box.contains((0.25,), 0.5)
        assert not box.contains((0.75,), 0.75)

    def test_boxes_tile_the_slab(self) -> None:
        cubes = [DyadicCube(0, -2, (i,)) for i in range(4)]
        boxes, slab = carleson_tiling_check(-2, cubes, 0.5)
        assert boxes == pytest.approx(slab)

    def test_tiling_needs_distinct_cubes_of_one_level(self) -> None:
        with pytest.raises(ParameterError, match="distinct"):
            carleson_tiling_check(-1, [HALF, HALF], 1.0)
        with pytest.raises(ParameterError, match="level -2"):
            carleson_tiling_check(-2, [HALF], 1.0)


class TestContinuousBounds:
    def test_indicator_bracket(self, settings: DyadnormSettings) -> None:
        f = StepFunction.indicator(HALF)
        est = continuous_weak_norm_bounds(f, p=1.0, gamma=0.5, kind="mean", window=LevelWindow(-3, 2), settings=settings)
        assert est.exactness == "exact"
        assert est.levels == (-3, 2)
        assert len(est.lattice_norms) == 3
        assert 0 < est.lower <= est.upper
        assert est.sample_estimate > 0
        assert est.slack >= 1.0
        assert any("window" in note for note in est.notes)
        assert "samples" not in est.record()

    def test_negative_function_has_no_lower_bound(self, settings: DyadnormSettings) -> None:
        f = StepFunction.indicator(HALF, -1.0)
        est = continuous_weak_norm_bounds(f, p=1.0, gamma=0.5, window=LevelWindow(-2, 1), settings=settings)
        assert est.lower == 0.0
        assert est.upper > 0
        assert any("f >= 0" in note for note in est.notes)

    def test_rejects_bad_parameters(self) -> None:
        f = StepFunction.indicator(HALF)
        with pytest.raises(ParameterError, match="γ != 0"):
            continuous_weak_norm_bounds(f, gamma=0.0)
        with pytest.raises(ParameterError, match="at least 1"):
            continuous_weak_norm_bounds(f, p=0.5)

    def test_needs_doubling_measure(self) -> None:
        mu = DyadicMeasure.from_densities([(HALF, 0.0)], dimension=1)
        with pytest.raises(ParameterError, match="doubling"):
            continuous_weak_norm_bounds(StepFunction.indicator(HALF), mu)

    def test_mean_needs_compact_support(self) -> None:
        f = StepFunction.from_leaves([(HALF, 2.0)], frame_level=0, outside_value=1.0, dimension=1)
        with pytest.raises(ParameterError, match="compactly supported"):
            continuous_weak_norm_bounds(f, kind="mean")

    def test_sample_levels(self, staircase: StepFunction) -> None:
        assert sample_levels(staircase, LevelWindow()) == (-4, 3)
        assert sample_levels(staircase, LevelWindow(-1, None)) == (-1, 3)

    def test_bracket_slack(self) -> None:
        assert bracket_slack(1.0, 2.0, 4.0) == 1.0
        assert bracket_slack(4.0, 2.0, 8.0) == 2.0
        assert bracket_slack(0.0, 3.0, 1.0) == 3.0


class TestSobolevSide:
    def test_ramp(self, settings: DyadnormSettings) -> None:
        report = sobolev_side_check_1d(StepFunction.indicator(unit_cube(1)), 2.0, LevelWindow(-4, 2), settings=settings)
        assert report.claim == "sobolev-1d"
        assert report.checks["ratio_finite"]
        assert report.measured["ratio"] > 0

    def test_exponent_range(self) -> None:
        with pytest.raises(ParameterError, match="1 < p"):
            sobolev_side_check_1d(StepFunction.indicator(unit_cube(1)), 1.0)

    def test_line_only(self) -> None:
        with pytest.raises(ParameterError, match="line"):
            sobolev_side_check_1d(StepFunction.indicator(unit_cube(2)), 2.0)
