"""Dyadic step-density measures; Lebesgue outside the density frame."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import TYPE_CHECKING

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import ParameterError
from dyadnorm.function.step import StepFunction

if TYPE_CHECKING:
    from dyadnorm.function.field import Field


@dataclass(frozen=True)
class AhlforsConstants:
    """c ℓ(Q)^d <= mu(Q) <= C ℓ(Q)^d over the inspected cubes."""

    exponent: float
    lower: float
    upper: float


@dataclass(frozen=True, eq=False)
class DyadicMeasure:
    """dmu = density dx with a nonnegative standard-lattice step density.

    The density equals 1 outside its frame, so a measure without cells is Lebesgue.
    """

    density: StepFunction
    doubling: float | None = None

    def __post_init__(self) -> None:
        if self.density.tail is not None:
            raise ParameterError("measure densities cannot carry a self-similar tail")
        if self.density.outside_value != 1.0:
            raise ParameterError(
                f"density must be 1 outside its frame, got {self.density.outside_value}"
            )
        if self.density.min_value() < 0:
            raise ParameterError("measure densities must be nonnegative")
        if self.doubling is not None and self.doubling < 1:
            raise ParameterError(f"doubling constant must be >= 1, got {self.doubling}")

    @classmethod
    def lebesgue(cls, dimension: int) -> DyadicMeasure:
        return cls(StepFunction.constant(1.0, dimension), doubling=2.0**dimension)

    @classmethod
    def from_densities(
        cls, leaves: Iterable[tuple[DyadicCube, float]], dimension: int | None = None
    ) -> DyadicMeasure:
        density = StepFunction.from_leaves(leaves, outside_value=1.0, dimension=dimension)
        measure = cls(density)
        if measure.density_bounds()[0] > 0:
            return cls(density, doubling=measure.doubling_bound())
        return measure

    @property
    def dimension(self) -> int:
        return self.density.dimension

    @property
    def frame_level(self) -> int:
        return self.density.frame_level

    @property
    def is_lebesgue(self) -> bool:
        low, high = self.density_bounds()
        return low == high == 1.0

    @property
    def is_doubling(self) -> bool:
        return self.doubling is not None

    def density_bounds(self) -> tuple[float, float]:
        return self.density.min_value(), self.density.max_value()

    def doubling_bound(self) -> float:
        """2^n dmax / dmin: a doubling constant valid for every ball."""
        low, high = self.density_bounds()
        if low <= 0:
            return math.inf
        return 2.0**self.dimension * high / low

    def field(self) -> Field:
        from dyadnorm.function.field import Field

        return Field(StepFunction.zero(self.dimension), self)

    def mass(self, cube: DyadicCube) -> float:
        if self.is_lebesgue:
            return float(cube.volume)
        return self.field().mass(cube)

    def ahlfors_constants(self, d: float, cubes: Iterable[DyadicCube]) -> AhlforsConstants:
        """Measured constants of mu(Q) ≈ ℓ(Q)^d over ``cubes``."""
        field = self.field()
        lower, upper = math.inf, 0.0
        for cube in cubes:
            ratio = field.mass(cube) / cube.side**d
            lower = min(lower, ratio)
            upper = max(upper, ratio)
        if upper == 0.0:
            raise ParameterError("no cubes with positive mass to measure Ahlfors regularity")
        return AhlforsConstants(d, lower, upper)
