"""The 3^n third-shifted dyadic lattices and ball covering."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from dyadnorm.dyadic.cube import DyadicCube, lattice_digits, lattice_shift, point_cube
from dyadnorm.errors import ParameterError


@dataclass(frozen=True)
class Ball:
    """Open Euclidean ball B(center, radius)."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ParameterError(f"ball radius must be positive and finite, got {self.radius}")
        if not self.center:
            raise ParameterError("ball center must have at least one coordinate")

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dimension) * self.radius**self.dimension


def unit_ball_volume(dimension: int) -> float:
    return math.pi ** (dimension / 2) / math.gamma(dimension / 2 + 1)


@dataclass(frozen=True)
class ShiftedLatticeFamily:
    """Lattice j shifts axis i by (-1)^k d_i 2^k / 3 at level k, d = base-3 digits of j."""

    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ParameterError(f"dimension must be positive, got {self.dimension}")

    @property
    def size(self) -> int:
        return 3**self.dimension

    @property
    def lattices(self) -> range:
        return range(self.size)

    def digits(self, lattice: int) -> tuple[int, ...]:
        return lattice_digits(lattice, self.dimension)

    def lattice_shift(self, lattice: int, level: int) -> tuple[Fraction, ...]:
        return lattice_shift(lattice, level, self.dimension)

    def covering_bound(self) -> float:
        """Every ball B sits in a member cube Q with |Q| < covering_bound() * |B|."""
        return 12.0**self.dimension / unit_ball_volume(self.dimension)

    def cover_ball(self, ball: Ball) -> tuple[int, DyadicCube]:
        """Smallest lattice id, then smallest level, whose cube contains the ball."""
        if ball.dimension != self.dimension:
            raise ParameterError(
                f"ball of dimension {ball.dimension} in a family of dimension {self.dimension}"
            )
        center = tuple(Fraction(c) for c in ball.center)
        r = Fraction(ball.radius)
        k_min = _ceil_log2(2 * r)
        k_max = _ceil_log2(6 * r)
        for lattice in self.lattices:
            for level in range(k_min, k_max + 1):
                cube = point_cube(lattice, level, center)
                if all(
                    lo <= c - r and c + r <= hi
                    for (lo, hi), c in zip(cube.bounds(), center, strict=True)
                ):
                    return lattice, cube
        raise AssertionError(f"no lattice covers {ball}; the third-shift family is total")

    def measured_constant(self, balls: Iterable[Ball]) -> float:
        """max |Q| / |B| over the returned covers."""
        worst = 0.0
        for ball in balls:
            _, cube = self.cover_ball(ball)
            worst = max(worst, float(cube.volume) / ball.volume)
        return worst


def _ceil_log2(x: Fraction) -> int:
    """Smallest k with 2^k >= x."""
    k = math.floor(math.log2(x))
    while Fraction(2) ** k < x:
        k += 1
    while Fraction(2) ** (k - 1) >= x:
        k -= 1
    return k
