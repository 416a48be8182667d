"""Exact cube statistics of a step function against a dyadic measure.

A ``Field`` joins f and mu on a common frame of standard-lattice cells. Every
node is a pair (f shape, density shape); distributions are memoised per
distinct pair, so a subtree that repeats a million times is aggregated once.
Cubes of the shifted lattices are cut from at most 2^n standard cells, with
the cut positions tracked in thirds of the cell side.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from dyadnorm.dyadic.cube import DyadicCube, level_sign
from dyadnorm.errors import ParameterError
from dyadnorm.function.distribution import Distribution, TailModel
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.shape import ONE, Shape, leaf, split
from dyadnorm.function.step import Index, StepFunction, cube_path, lift_cells

Pair = tuple[Shape, Shape]
Box = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CubeView:
    """The block of standard cells a cube of any lattice is cut from.

    ``cells`` lists (pair, box) for each overlapped cell; ``t3`` is the cube's
    offset in thirds of a cell per axis (0 on axes aligned with lattice 0).
    """

    level: int
    base: Index
    t3: tuple[int, ...]
    cells: tuple[tuple[Pair, Box], ...]


class Field:
    """Function f against measure mu, both as standard-lattice step trees."""

    def __init__(self, f: StepFunction, mu: DyadicMeasure | None = None) -> None:
        mu = mu if mu is not None else DyadicMeasure.lebesgue(f.dimension)
        if mu.dimension != f.dimension:
            raise ParameterError(
                f"function of dimension {f.dimension} against a measure of dimension {mu.dimension}"
            )
        self.f = f
        self.mu = mu
        self.dimension = n = f.dimension
        self.frame_level = frame = max(f.frame_level, mu.frame_level)
        fill = leaf(f.outside_value)
        f_cells = lift_cells(f.cells, f.frame_level, frame, fill, n)
        m_cells = lift_cells(mu.density.cells, mu.frame_level, frame, ONE, n)
        self.outside: Pair = (fill, ONE)
        self.cells: dict[Index, Pair] = {
            j: (f_cells.get(j, fill), m_cells.get(j, ONE)) for j in f_cells.keys() | m_cells.keys()
        }
        self._world: dict[int, dict[Index, Pair]] = {frame: self.cells}
        self._full: dict[tuple[int, int], Distribution] = {}
        self._part: dict[tuple[int, int, Box], Distribution] = {}
        self._children: dict[tuple[int, int], list[Pair]] = {}
        self.tail_model: TailModel | None = None
        self._anchor_frame: Index = ()
        self._anchor_bits: list[int] = []
        if f.tail is not None:
            self._init_tail()

    # ---- structure ----------------------------------------------------------

    @property
    def has_tail(self) -> bool:
        return self.tail_model is not None

    def child_pairs(self, pair: Pair) -> list[Pair]:
        key = (id(pair[0]), id(pair[1]))
        cached = self._children.get(key)
        if cached is not None:
            return cached
        count = 1 << self.dimension
        fs, ms = pair
        f_children = fs.children if fs.is_split else (fs,) * count
        m_children = ms.children if ms.is_split else (ms,) * count
        out = list(zip(f_children, m_children, strict=True))
        self._children[key] = out
        return out

    @staticmethod
    def is_constant(pair: Pair) -> bool:
        return pair[0].is_leaf and pair[1].is_leaf

    def world(self, level: int) -> dict[Index, Pair]:
        """Nonempty cells of the standard lattice at a level at or above the frame."""
        if level < self.frame_level:
            raise ParameterError(f"world levels start at the frame level {self.frame_level}")
        cached = self._world.get(level)
        if cached is not None:
            return cached
        below = self.world(level - 1)
        parents: dict[Index, list[Pair]] = {}
        for index, pair in below.items():
            parent = tuple(j >> 1 for j in index)
            number = sum((j & 1) << i for i, j in enumerate(index))
            slots = parents.setdefault(parent, [self.outside] * (1 << self.dimension))
            slots[number] = pair
        out = {
            j: (split([p[0] for p in slots]), split([p[1] for p in slots]))
            for j, slots in parents.items()
        }
        self._world[level] = out
        return out

    def _init_tail(self) -> None:
        tail = self.f.tail
        assert tail is not None
        anchor = tail.anchor
        if anchor.level >= self.frame_level:
            raise ParameterError("the self-similar anchor must lie below the frame level")
        self._anchor_bits = cube_path(anchor, self.frame_level)
        self._anchor_frame = anchor.ancestor(self.frame_level - anchor.level).index
        pair = self.cells.get(self._anchor_frame, self.outside)
        for bit in self._anchor_bits:
            pair = self.child_pairs(pair)[bit]
        density = pair[1]
        if not (density.is_leaf and density.value == 1.0):
            raise ParameterError("self-similar tails need Lebesgue measure on the anchor")
        weight = 2.0**-self.dimension
        ring = Distribution.merge(
            (self.full(child), weight)
            for number, child in enumerate(self.child_pairs(pair))
            if number != tail.corner
        )
        if ring.has_tail or not ring.values.size:
            raise ParameterError("the anchor ring must be finite and nonempty")
        self.tail_model = TailModel(ring.values, ring.masses, tail.offset, tail.scale, self.dimension)

    # ---- distributions of nodes --------------------------------------------

    def full(self, pair: Pair) -> Distribution:
        """Distribution over the whole cell of ``pair`` (masses relative to its volume)."""
        key = (id(pair[0]), id(pair[1]))
        cached = self._full.get(key)
        if cached is not None:
            return cached
        fs, ms = pair
        if fs.is_marker:
            if self.tail_model is None:
                raise ParameterError("self-similar corner reached before the tail was set up")
            out = Distribution.tail(1.0, self.tail_model.offset, self.tail_model.scale, self.tail_model)
        elif fs.is_leaf and ms.is_leaf:
            out = Distribution.point(fs.value, ms.value)
        else:
            weight = 2.0**-self.dimension
            out = Distribution.merge((self.full(c), weight) for c in self.child_pairs(pair))
        self._full[key] = out
        return out

    def part(self, pair: Pair, box: Box) -> Distribution:
        """Distribution over the sub-box of the cell given in thirds [lo, hi) per axis."""
        if all(lo == 0 and hi == 3 for lo, hi in box):
            return self.full(pair)
        key = (id(pair[0]), id(pair[1]), box)
        cached = self._part.get(key)
        if cached is not None:
            return cached
        fs, ms = pair
        if fs.is_marker:
            raise ParameterError("shifted cubes cutting a self-similar corner are not supported")
        if fs.is_leaf and ms.is_leaf:
            volume = math.prod(hi - lo for lo, hi in box) / 3.0**self.dimension
            out = Distribution.point(fs.value, ms.value * volume)
        else:
            weight = 2.0**-self.dimension
            parts = []
            for number, child in enumerate(self.child_pairs(pair)):
                sub = child_box(box, number)
                if sub is not None:
                    parts.append((self.part(child, sub), weight))
            out = Distribution.merge(parts)
        self._part[key] = out
        return out

    def node(self, level: int, index: Index) -> tuple[Pair, float, float]:
        """Pair of the standard cube (level, index) with the affine map a + b * (.) of its values."""
        if level >= self.frame_level:
            return self.world(level).get(index, self.outside), 0.0, 1.0
        shift = self.frame_level - level
        frame = tuple(j >> shift for j in index)
        path = [
            sum(((j >> t) & 1) << i for i, j in enumerate(index)) for t in range(shift - 1, -1, -1)
        ]
        pair = self.cells.get(frame, self.outside)
        a, b = 0.0, 1.0
        step = 0
        while step < len(path):
            if self.is_constant(pair):
                return pair, a, b
            if pair[0].is_marker:
                assert self.tail_model is not None
                a += b * self.tail_model.offset
                b *= self.tail_model.scale
                path = self._anchor_bits + path[step:]
                pair = self.cells.get(self._anchor_frame, self.outside)
                step = 0
                continue
            pair = self.child_pairs(pair)[path[step]]
            step += 1
        return pair, a, b

    # ---- cubes of any lattice ----------------------------------------------

    def view(self, cube: DyadicCube) -> CubeView:
        """Standard cells at the cube's level overlapped by the cube, with their boxes."""
        if cube.dimension != self.dimension:
            raise ParameterError(f"{cube} has the wrong dimension")
        sign = level_sign(cube.level)
        base = []
        t3 = []
        for j, d in zip(cube.index, cube.digits, strict=True):
            m, r = divmod(3 * j + sign * d, 3)
            base.append(m)
            t3.append(r)
        if self.has_tail and any(t3):
            raise ParameterError("shifted-lattice statistics of self-similar functions are not supported")
        cells = []
        for bits in block_bits(tuple(t3)):
            index = tuple(m + b for m, b in zip(base, bits, strict=True))
            pair, _, _ = self.node(cube.level, index)
            cells.append((pair, third_box(tuple(t3), bits)))
        return CubeView(cube.level, tuple(base), tuple(t3), tuple(cells))

    def distribution(self, cube: DyadicCube) -> Distribution:
        """Distribution of f over a cube of any lattice, masses relative to |Q|."""
        if cube.lattice == 0:
            if cube.dimension != self.dimension:
                raise ParameterError(f"{cube} has the wrong dimension")
            pair, a, b = self.node(cube.level, cube.index)
            return self.full(pair).affine(a, b)
        view = self.view(cube)
        return Distribution.merge((self.part(pair, box), 1.0) for pair, box in view.cells)

    def mass(self, cube: DyadicCube) -> float:
        return self.distribution(cube).total_mass * _volume(cube.level, self.dimension)

    def integral(self, cube: DyadicCube) -> float:
        return self.distribution(cube).integral * _volume(cube.level, self.dimension)

    def mean(self, cube: DyadicCube) -> float:
        return self.distribution(cube).mean()

    def oscillation(self, cube: DyadicCube) -> float:
        return self.distribution(cube).oscillation()

    def mean_abs_deviation(self, cube: DyadicCube, c: float) -> float:
        """Average of |f - c| over the cube; 0 when mu(Q) = 0."""
        return self.distribution(cube).mean_abs_deviation(c)

    # ---- arbitrary boxes -----------------------------------------------------

    def box_distribution(
        self, lo: Sequence[Fraction | float], hi: Sequence[Fraction | float]
    ) -> Distribution:
        """Distribution over the axis-parallel box [lo, hi), masses relative to its volume."""
        lo_q = tuple(Fraction(v) for v in lo)
        hi_q = tuple(Fraction(v) for v in hi)
        if len(lo_q) != self.dimension or len(hi_q) != self.dimension:
            raise ParameterError("box corners have the wrong dimension")
        if any(a >= b for a, b in zip(lo_q, hi_q, strict=True)):
            raise ParameterError(f"empty box [{lo}, {hi})")
        box_volume = math.prod(b - a for a, b in zip(lo_q, hi_q, strict=True))
        side = Fraction(2) ** self.frame_level
        parts: list[tuple[Distribution, float]] = []
        covered = Fraction(0)
        for index, pair in self.cells.items():
            rel = []
            for j, a, b in zip(index, lo_q, hi_q, strict=True):
                cell_lo = j * side
                r_lo = max((a - cell_lo) / side, Fraction(0))
                r_hi = min((b - cell_lo) / side, Fraction(1))
                if r_lo >= r_hi:
                    break
                rel.append((r_lo, r_hi))
            else:
                inside = math.prod(h - lw for lw, h in rel)
                covered += inside * side**self.dimension
                weight = float(side**self.dimension / box_volume)
                parts.append((self._exact_part(pair, tuple(rel)), weight))
        rest = box_volume - covered
        if rest > 0:
            outside_value = self.outside[0].value
            parts.append((Distribution.point(outside_value, 1.0), float(rest / box_volume)))
        return Distribution.merge(parts)

    def _exact_part(self, pair: Pair, rel: tuple[tuple[Fraction, Fraction], ...]) -> Distribution:
        if all(a == 0 and b == 1 for a, b in rel):
            return self.full(pair)
        fs, ms = pair
        if fs.is_marker:
            raise ParameterError("boxes cutting a self-similar corner are not supported")
        if fs.is_leaf and ms.is_leaf:
            return Distribution.point(fs.value, ms.value * float(math.prod(b - a for a, b in rel)))
        weight = 2.0**-self.dimension
        parts = []
        for number, child in enumerate(self.child_pairs(pair)):
            sub = []
            for axis, (a, b) in enumerate(rel):
                bit = (number >> axis) & 1
                c_lo = max(2 * a - bit, Fraction(0))
                c_hi = min(2 * b - bit, Fraction(1))
                if c_lo >= c_hi:
                    break
                sub.append((c_lo, c_hi))
            else:
                parts.append((self._exact_part(child, tuple(sub)), weight))
        return Distribution.merge(parts)

    # ---- content ---------------------------------------------------------------

    def content_cells(self) -> list[Index]:
        """Frame cells where f or mu differs from the outside pair."""
        return sorted(j for j, pair in self.cells.items() if pair != self.outside)

    def iter_frame_cubes(self) -> Iterator[tuple[DyadicCube, Pair]]:
        for index in self.content_cells():
            yield DyadicCube(0, self.frame_level, index), self.cells[index]


def child_box(box: Box, number: int) -> Box | None:
    """Box (in thirds of the child's side) covered inside child ``number``."""
    out = []
    for axis, (lo, hi) in enumerate(box):
        bit = (number >> axis) & 1
        c_lo = max(2 * lo - 3 * bit, 0)
        c_hi = min(2 * hi - 3 * bit, 3)
        if c_lo >= c_hi:
            return None
        out.append((c_lo, c_hi))
    return tuple(out)


def third_box(t3: tuple[int, ...], bits: tuple[int, ...]) -> Box:
    """Portion of cell base + bits covered by a cube offset by t3 thirds."""
    box = []
    for t, b in zip(t3, bits, strict=True):
        if t == 0:
            box.append((0, 3))
        elif b == 0:
            box.append((t, 3))
        else:
            box.append((0, t))
    return tuple(box)


def block_bits(t3: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Bit patterns of the cells a cube overlaps: 0 on aligned axes, 0 or 1 elsewhere."""
    patterns: list[tuple[int, ...]] = [()]
    for t in t3:
        options = (0,) if t == 0 else (0, 1)
        patterns = [p + (b,) for p in patterns for b in options]
    return patterns


def _volume(level: int, dimension: int) -> float:
    return math.ldexp(1.0, level * dimension)
