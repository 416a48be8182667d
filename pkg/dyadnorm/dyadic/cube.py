"""Dyadic cubes in the standard lattice and its third-shifted companions."""

from __future__ import annotations

import math
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from dyadnorm.errors import ParameterError, RangeError

INDEX_BITS = 62
_INDEX_LIMIT = 1 << INDEX_BITS

_CUBE_RE = re.compile(r"^L(\d+):k(-?\d+):\(([-\d,\s]*)\)$")

Rational = Fraction | int | float


def lattice_digits(lattice: int, dimension: int) -> tuple[int, ...]:
    """Base-3 digits of a lattice id, axis 0 least significant."""
    if dimension < 1:
        raise ParameterError(f"dimension must be positive, got {dimension}")
    if not 0 <= lattice < 3**dimension:
        raise ParameterError(
            f"lattice id {lattice} outside [0, {3**dimension}) for dimension {dimension}"
        )
    digits = []
    for _ in range(dimension):
        digits.append(lattice % 3)
        lattice //= 3
    return tuple(digits)


def level_sign(level: int) -> int:
    """Direction of the third-shift at a level: +1 on even levels, -1 on odd ones."""
    return 1 if level % 2 == 0 else -1


def lattice_shift(lattice: int, level: int, dimension: int) -> tuple[Fraction, ...]:
    """Exact shift vector s(k) of a lattice at a level."""
    sign = level_sign(level)
    side = Fraction(2) ** level
    return tuple(sign * d * side / 3 for d in lattice_digits(lattice, dimension))


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Half-open cube prod [2^k (j_i + t_i(k)), 2^k (j_i + 1 + t_i(k))) of one lattice."""

    lattice: int
    level: int
    index: tuple[int, ...]

    def __post_init__(self) -> None:
        for j in self.index:
            if not -_INDEX_LIMIT <= j < _INDEX_LIMIT:
                raise RangeError(f"cube index {j} exceeds {INDEX_BITS}-bit magnitude")
        lattice_digits(self.lattice, len(self.index))

    @property
    def dimension(self) -> int:
        return len(self.index)

    @property
    def digits(self) -> tuple[int, ...]:
        return lattice_digits(self.lattice, self.dimension)

    @property
    def sidelength(self) -> Fraction:
        return Fraction(2) ** self.level

    @property
    def side(self) -> float:
        return math.ldexp(1.0, self.level)

    @property
    def volume(self) -> Fraction:
        return self.sidelength**self.dimension

    def bounds(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Exact (lo, hi) per axis."""
        side = self.sidelength
        sign = level_sign(self.level)
        out = []
        for j, d in zip(self.index, self.digits, strict=True):
            lo = side * (j + Fraction(sign * d, 3))
            out.append((lo, lo + side))
        return tuple(out)

    def child(self, number: int) -> DyadicCube:
        """Child cube; bit i of ``number`` selects the upper half on axis i."""
        if not 0 <= number < 1 << self.dimension:
            raise ParameterError(f"child number {number} outside [0, {1 << self.dimension})")
        sign = level_sign(self.level)
        index = tuple(
            2 * j + ((number >> i) & 1) + sign * d
            for i, (j, d) in enumerate(zip(self.index, self.digits, strict=True))
        )
        return DyadicCube(self.lattice, self.level - 1, index)

    def children(self) -> list[DyadicCube]:
        return [self.child(c) for c in range(1 << self.dimension)]

    def child_number(self) -> int:
        """Which child of its parent this cube is."""
        sign = level_sign(self.level + 1)
        number = 0
        for i, (j, d) in enumerate(zip(self.index, self.digits, strict=True)):
            number |= ((j - sign * d) & 1) << i
        return number

    def parent(self) -> DyadicCube:
        sign = level_sign(self.level + 1)
        index = tuple(
            (j - sign * d) // 2 for j, d in zip(self.index, self.digits, strict=True)
        )
        return DyadicCube(self.lattice, self.level + 1, index)

    def ancestor(self, k: int) -> DyadicCube:
        """The ancestor k levels up; ``ancestor(0)`` is the cube itself."""
        if k < 0:
            raise ParameterError(f"ancestor degree must be nonnegative, got {k}")
        cube = self
        for _ in range(k):
            cube = cube.parent()
        return cube

    def ancestors(self) -> Iterator[DyadicCube]:
        """Strict ancestors, nearest first (unbounded)."""
        cube = self
        while True:
            cube = cube.parent()
            yield cube

    def contains(self, other: DyadicCube) -> bool:
        """Set inclusion; exact for cubes of any two lattices."""
        if other.dimension != self.dimension:
            return False
        if other.lattice == self.lattice:
            return other.level <= self.level and other.ancestor(self.level - other.level) == self
        return all(
            a_lo <= b_lo and b_hi <= a_hi
            for (a_lo, a_hi), (b_lo, b_hi) in zip(self.bounds(), other.bounds(), strict=True)
        )

    def intersects(self, other: DyadicCube) -> bool:
        return all(
            a_lo < b_hi and b_lo < a_hi
            for (a_lo, a_hi), (b_lo, b_hi) in zip(self.bounds(), other.bounds(), strict=True)
        )

    def quadrant(self) -> tuple[int, ...]:
        """Per axis 0 if the cube lies in [0, inf), 1 if in (-inf, 0), -1 if it straddles 0."""
        out = []
        for lo, hi in self.bounds():
            if lo >= 0:
                out.append(0)
            elif hi <= 0:
                out.append(1)
            else:
                out.append(-1)
        return tuple(out)

    def contains_point(self, x: Sequence[Rational]) -> bool:
        return all(
            lo <= Fraction(v) < hi for (lo, hi), v in zip(self.bounds(), x, strict=True)
        )

    def __str__(self) -> str:
        return format_cube(self)


def format_cube(cube: DyadicCube) -> str:
    """Text form ``L<lattice>:k<level>:(j1,...,jn)``."""
    return f"L{cube.lattice}:k{cube.level}:({','.join(str(j) for j in cube.index)})"


def parse_cube(text: str) -> DyadicCube:
    match = _CUBE_RE.match(text.strip())
    if not match:
        raise ParameterError(f"not a cube: {text!r} (expected L<lattice>:k<level>:(j1,...))")
    parts = [p.strip() for p in match.group(3).split(",") if p.strip()]
    if not parts:
        raise ParameterError(f"cube {text!r} has an empty index")
    return DyadicCube(int(match.group(1)), int(match.group(2)), tuple(int(p) for p in parts))


def point_cube(lattice: int, level: int, x: Sequence[Rational]) -> DyadicCube:
    """The cube of a lattice at a level containing the point x."""
    dimension = len(x)
    sign = level_sign(level)
    side = Fraction(2) ** level
    index = tuple(
        math.floor(Fraction(v) / side - Fraction(sign * d, 3))
        for v, d in zip(x, lattice_digits(lattice, dimension), strict=True)
    )
    return DyadicCube(lattice, level, index)


def unit_cube(dimension: int) -> DyadicCube:
    """[0, 1)^n in the standard lattice."""
    return DyadicCube(0, 0, (0,) * dimension)
