"""Dyadic rectangles R = Q x Q' and their mean sidelengths."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import ParameterError

EXPONENT_TOLERANCE = 1e-12


@dataclass(frozen=True, order=True)
class DyadicRectangle:
    first: DyadicCube
    second: DyadicCube

    def __post_init__(self) -> None:
        if self.first.lattice != 0 or self.second.lattice != 0:
            raise ParameterError("rectangles are products of standard-lattice cubes")

    @property
    def dimensions(self) -> tuple[int, int]:
        return self.first.dimension, self.second.dimension

    @property
    def l1(self) -> Fraction:
        return self.first.sidelength

    @property
    def l2(self) -> Fraction:
        return self.second.sidelength

    @property
    def level_min(self) -> int:
        return min(self.first.level, self.second.level)

    @property
    def level_max(self) -> int:
        return max(self.first.level, self.second.level)

    @property
    def l_min(self) -> Fraction:
        return Fraction(2) ** self.level_min

    @property
    def l_max(self) -> Fraction:
        return Fraction(2) ** self.level_max

    @property
    def volume(self) -> Fraction:
        return self.first.volume * self.second.volume

    def is_square(self) -> bool:
        return self.first.level == self.second.level

    def __str__(self) -> str:
        return f"{self.first}x{self.second}"


def mean_sidelength(rect: DyadicRectangle, alpha: float, beta: float) -> float:
    """l_min(R)^alpha * l_max(R)^beta with alpha + beta = 1."""
    check_exponent_pair(alpha, beta)
    return float(2.0 ** (alpha * rect.level_min + beta * rect.level_max))


def check_exponent_pair(alpha: float, beta: float) -> None:
    if abs(alpha + beta - 1.0) > EXPONENT_TOLERANCE:
        raise ParameterError(f"exponents must satisfy alpha + beta = 1, got {alpha} + {beta}")
