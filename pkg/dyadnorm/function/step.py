"""Adaptive dyadic step functions with an optional affine self-similar continuation."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NoReturn

import numpy as np

from dyadnorm.dyadic.cube import DyadicCube, point_cube
from dyadnorm.errors import BudgetError, ParameterError
from dyadnorm.function.shape import (
    MARKER,
    Shape,
    deepen,
    leaf,
    map_leaves,
    split,
)

Index = tuple[int, ...]

# Following an orbit of phi^{-1} longer than this means x is the fixed corner point.
_MAX_TAIL_ORBIT = 1100


@dataclass(frozen=True)
class SelfSimilarTail:
    """On the corner child C of ``anchor``: f = offset + scale * f(phi^{-1} x), phi: A -> C."""

    anchor: DyadicCube
    corner: int
    offset: float
    scale: float

    def __post_init__(self) -> None:
        if self.anchor.lattice != 0:
            raise ParameterError("the self-similar anchor must be a standard-lattice cube")
        n = self.anchor.dimension
        if not 0 <= self.corner < 1 << n:
            raise ParameterError(f"corner {self.corner} outside [0, {1 << n})")
        if self.offset < 0:
            raise ParameterError(f"self-similar offset must be >= 0, got {self.offset}")
        if self.scale < 1:
            raise ParameterError(f"self-similar scale must be >= 1, got {self.scale}")
        if self.scale * 2.0**-n >= 1:
            raise ParameterError(
                f"self-similar scale {self.scale} must be below 2^n = {2**n} for integrability"
            )

    @property
    def corner_cube(self) -> DyadicCube:
        return self.anchor.child(self.corner)

    def pull_back(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """phi^{-1}: corner child -> anchor."""
        a_bounds = self.anchor.bounds()
        c_bounds = self.corner_cube.bounds()
        return tuple(
            a_lo + 2 * (v - c_lo) for v, (a_lo, _), (c_lo, _) in zip(x, a_bounds, c_bounds, strict=True)
        )


@dataclass(frozen=True, eq=False)
class StepFunction:
    """f = shape of cell j on each standard-lattice frame cell [2^K j, 2^K (j+1)), outside_value elsewhere."""

    dimension: int
    frame_level: int
    cells: Mapping[Index, Shape] = field(default_factory=dict)
    outside_value: float = 0.0
    tail: SelfSimilarTail | None = None

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ParameterError(f"dimension must be positive, got {self.dimension}")
        if math.isnan(self.outside_value) or math.isinf(self.outside_value):
            raise ParameterError(f"outside value must be finite, got {self.outside_value}")
        for index in self.cells:
            if len(index) != self.dimension:
                raise ParameterError(f"cell index {index} has the wrong dimension")
        markers = sum(_marker_count(s, {}) for s in self.cells.values())
        if self.tail is None:
            if markers:
                raise ParameterError("self-similar marker without a tail description")
            return
        if markers != 1:
            raise ParameterError(f"a self-similar tail needs exactly one marker, found {markers}")
        if self.tail.anchor.dimension != self.dimension:
            raise ParameterError("tail anchor has the wrong dimension")
        anchor_shape = self.shape_at(self.tail.anchor)
        if not anchor_shape.is_split or anchor_shape.children[self.tail.corner] is not MARKER:
            raise ParameterError(f"the marker must be the corner child of {self.tail.anchor}")
        if _min_leaf(anchor_shape) < 0:
            raise ParameterError("values inside the self-similar anchor must be nonnegative")

    # ---- construction -------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int) -> StepFunction:
        return cls(dimension, 0, {})

    @classmethod
    def constant(cls, value: float, dimension: int) -> StepFunction:
        return cls(dimension, 0, {}, float(value))

    @classmethod
    def indicator(cls, cube: DyadicCube, value: float = 1.0) -> StepFunction:
        return cls.from_cube_weights([(cube, value)])

    @classmethod
    def from_cube_weights(
        cls,
        items: Iterable[tuple[DyadicCube, float]],
        frame_level: int | None = None,
        outside_value: float = 0.0,
        dimension: int | None = None,
    ) -> StepFunction:
        """outside_value + sum of w_Q chi_Q over standard-lattice cubes."""
        pairs = list(items)
        trie = _Trie(_frame_level_for(pairs, frame_level), dimension)
        for cube, weight in pairs:
            trie.insert(cube, float(weight), exclusive=False)
        return trie.build(outside_value)

    @classmethod
    def from_leaves(
        cls,
        leaves: Iterable[tuple[DyadicCube, float]],
        frame_level: int | None = None,
        outside_value: float = 0.0,
        dimension: int | None = None,
    ) -> StepFunction:
        """Value on each of a disjoint family of cubes, outside_value elsewhere."""
        pairs = list(leaves)
        trie = _Trie(_frame_level_for(pairs, frame_level), dimension)
        for cube, value in pairs:
            trie.insert(cube, float(value) - outside_value, exclusive=True)
        return trie.build(outside_value)

    @classmethod
    def from_array(cls, values: np.ndarray, root: DyadicCube) -> StepFunction:
        """Dense grid of 2^d cells per axis filling ``root``; axis i of the array is axis i of space."""
        arr = np.asarray(values, dtype=np.float64)
        if root.lattice != 0:
            raise ParameterError("from_array needs a standard-lattice root")
        if arr.ndim != root.dimension or len(set(arr.shape)) != 1:
            raise ParameterError(f"array of shape {arr.shape} is not a cube grid in {root.dimension}-D")
        size = arr.shape[0]
        if size < 1 or size & (size - 1):
            raise ParameterError(f"grid side {size} is not a power of two")
        shape = _shape_from_block(arr, root.dimension)
        return cls(root.dimension, root.level, {root.index: shape})

    # ---- transforms ---------------------------------------------------------

    def _map(self, fn: Callable[[float], float]) -> dict[Index, Shape]:
        memo: dict[int, Shape] = {}
        return {j: map_leaves(s, fn, memo) for j, s in self.cells.items()}

    def scaled(self, c: float) -> StepFunction:
        c = float(c)
        tail = self.tail
        if tail is not None:
            if c <= 0:
                self._refuse_tail("scaling by a nonpositive factor")
            tail = SelfSimilarTail(tail.anchor, tail.corner, c * tail.offset, tail.scale)
        cells = self._map(lambda v: c * v)
        return StepFunction(self.dimension, self.frame_level, cells, c * self.outside_value, tail)

    def shifted(self, c: float) -> StepFunction:
        c = float(c)
        tail = self.tail
        if tail is not None:
            tail = SelfSimilarTail(
                tail.anchor, tail.corner, tail.offset + c * (1.0 - tail.scale), tail.scale
            )
        cells = self._map(lambda v: v + c)
        return StepFunction(self.dimension, self.frame_level, cells, self.outside_value + c, tail)

    def abs(self) -> StepFunction:
        if self.tail is not None:
            if self.min_value() < 0:
                self._refuse_tail("abs of a sign-changing function")
            return self
        cells = self._map(abs)
        return StepFunction(self.dimension, self.frame_level, cells, abs(self.outside_value))

    def restricted(self, cube: DyadicCube) -> StepFunction:
        """f * chi_Q for a standard-lattice cube Q."""
        if cube.lattice != 0 or cube.dimension != self.dimension:
            raise ParameterError(f"cannot restrict to {cube}")
        tail = self.tail
        if tail is not None and not cube.contains(tail.anchor):
            if tail.anchor.contains(cube):
                self._refuse_tail("restriction to a cube inside the anchor")
            tail = None
        if cube.level >= self.frame_level:
            fill = leaf(self.outside_value)
            lifted = lift_cells(self.cells, self.frame_level, cube.level, fill, self.dimension)
            shape = lifted.get(cube.index, fill)
        else:
            shape = self.shape_at(cube)
        return StepFunction(self.dimension, cube.level, {cube.index: shape}, 0.0, tail)

    def refine(self, to_level: int, max_nodes: int | None = None) -> StepFunction:
        """Split leaves down to ``to_level``; pointwise the same function."""
        if to_level > self.frame_level:
            raise ParameterError(
                f"refine target level {to_level} is above the frame level {self.frame_level}"
            )
        levels = self.frame_level - to_level
        memo: dict[tuple[int, int], Shape] = {}
        cells = {j: deepen(s, levels, self.dimension, memo) for j, s in self.cells.items()}
        refined = StepFunction(self.dimension, self.frame_level, cells, self.outside_value, self.tail)
        if max_nodes is not None and refined.node_count > max_nodes:
            raise BudgetError(f"refinement needs {refined.node_count} nodes, budget is {max_nodes}")
        return refined

    def with_frame_level(self, level: int) -> StepFunction:
        """Same function over a coarser frame."""
        if level < self.frame_level:
            raise ParameterError(f"frame level can only grow, {level} < {self.frame_level}")
        cells = lift_cells(self.cells, self.frame_level, level, leaf(self.outside_value), self.dimension)
        return StepFunction(self.dimension, level, cells, self.outside_value, self.tail)

    # ---- queries ------------------------------------------------------------

    def frame_cube(self, index: Index) -> DyadicCube:
        return DyadicCube(0, self.frame_level, index)

    def shape_at(self, cube: DyadicCube) -> Shape:
        """Shape of f on a standard-lattice cube at or below the frame level (no tail remap)."""
        if cube.level > self.frame_level:
            raise ParameterError(f"{cube} lies above the frame level {self.frame_level}")
        frame = cube.ancestor(self.frame_level - cube.level)
        shape = self.cells.get(frame.index, leaf(self.outside_value))
        for bit in cube_path(cube, self.frame_level):
            if shape.is_leaf:
                return shape
            if shape.is_marker:
                self._refuse_tail("shape lookup inside the corner")
            shape = shape.children[bit]
        return shape

    def value_at(self, x: Sequence[float | Fraction]) -> float:
        point = tuple(Fraction(v) for v in x)
        offset, scale = 0.0, 1.0
        for _ in range(_MAX_TAIL_ORBIT):
            frame = point_cube(0, self.frame_level, point)
            shape = self.cells.get(frame.index, leaf(self.outside_value))
            cube = frame
            while shape.is_split:
                number = _child_containing(cube, point)
                cube = cube.child(number)
                shape = shape.children[number]
            if shape.is_leaf:
                return offset + scale * shape.value
            assert self.tail is not None
            offset += scale * self.tail.offset
            scale *= self.tail.scale
            point = self.tail.pull_back(point)
        return math.inf

    def leaves(self, max_leaves: int | None = None) -> Iterator[tuple[DyadicCube, float]]:
        """Leaf cubes of the frame (tree order); outside_value holds elsewhere."""
        if self.tail is not None:
            self._refuse_tail("leaf enumeration")
        count = 0
        for index in sorted(self.cells):
            stack: list[tuple[DyadicCube, Shape]] = [(self.frame_cube(index), self.cells[index])]
            while stack:
                cube, shape = stack.pop()
                if shape.is_leaf:
                    count += 1
                    if max_leaves is not None and count > max_leaves:
                        raise BudgetError(f"more than {max_leaves} leaves")
                    yield cube, shape.value
                else:
                    stack.extend(reversed(list(zip(cube.children(), shape.children, strict=True))))

    @property
    def node_count(self) -> int:
        return sum(s.nodes for s in self.cells.values())

    @property
    def finest_level(self) -> int:
        depth = max((s.depth for s in self.cells.values()), default=0)
        return self.frame_level - depth

    def min_value(self) -> float:
        values = [_min_leaf(s) for s in self.cells.values()]
        values.append(self.outside_value)
        return min(values)

    def max_value(self) -> float:
        if self.tail is not None:
            return math.inf
        values = [_max_leaf(s) for s in self.cells.values()]
        values.append(self.outside_value)
        return max(values)

    def is_zero(self) -> bool:
        return self.outside_value == 0.0 and all(
            s.is_leaf and s.value == 0.0 for s in self.cells.values()
        )

    def support_cells(self) -> list[Index]:
        """Frame cells whose shape differs from the outside value."""
        outside = leaf(self.outside_value)
        return sorted(j for j, s in self.cells.items() if s is not outside)

    def _refuse_tail(self, what: str) -> NoReturn:
        raise ParameterError(f"{what} is not available for functions with a self-similar tail")


# ---- helpers --------------------------------------------------------------


def cube_path(cube: DyadicCube, from_level: int) -> list[int]:
    """Child numbers leading from the standard-lattice ancestor at ``from_level`` down to ``cube``."""
    path = []
    current = cube
    for _ in range(from_level - cube.level):
        path.append(current.child_number())
        current = current.parent()
    path.reverse()
    return path


def lift_cells(
    cells: Mapping[Index, Shape],
    from_level: int,
    to_level: int,
    fill: Shape,
    dimension: int,
) -> dict[Index, Shape]:
    """Regroup standard-lattice frame cells into the coarser frame at ``to_level``."""
    current = dict(cells)
    for _ in range(to_level - from_level):
        parents: dict[Index, list[Shape]] = {}
        for index, shape in current.items():
            parent = tuple(j >> 1 for j in index)
            number = sum((j & 1) << i for i, j in enumerate(index))
            slots = parents.setdefault(parent, [fill] * (1 << dimension))
            slots[number] = shape
        current = {j: split(children) for j, children in parents.items()}
    return current


def _frame_level_for(pairs: Sequence[tuple[DyadicCube, float]], frame_level: int | None) -> int:
    if not pairs:
        return 0 if frame_level is None else frame_level
    top = max(q.level for q, _ in pairs)
    if frame_level is None:
        return top
    if frame_level < top:
        raise ParameterError(f"frame level {frame_level} is below a cube at level {top}")
    return frame_level


def _child_containing(cube: DyadicCube, point: Sequence[Fraction]) -> int:
    number = 0
    for i, ((lo, hi), v) in enumerate(zip(cube.bounds(), point, strict=True)):
        if v >= (lo + hi) / 2:
            number |= 1 << i
    return number


def _shape_from_block(block: np.ndarray, dimension: int) -> Shape:
    first = block.flat[0]
    if np.all(block == first):
        return leaf(float(first))
    half = block.shape[0] // 2
    children = []
    for number in range(1 << dimension):
        slices = tuple(
            slice(half, None) if (number >> axis) & 1 else slice(0, half) for axis in range(dimension)
        )
        children.append(_shape_from_block(block[slices], dimension))
    return split(children)


def _marker_count(shape: Shape, memo: dict[int, int]) -> int:
    if not shape.has_marker:
        return 0
    if shape.is_marker:
        return 1
    cached = memo.get(id(shape))
    if cached is None:
        cached = sum(_marker_count(c, memo) for c in shape.children)
        memo[id(shape)] = cached
    return cached


def _min_leaf(shape: Shape) -> float:
    return _leaf_extreme(shape, True, {})


def _max_leaf(shape: Shape) -> float:
    return _leaf_extreme(shape, False, {})


def _leaf_extreme(shape: Shape, lowest: bool, memo: dict[int, float]) -> float:
    if shape.is_leaf:
        return shape.value
    if shape.is_marker:
        return math.inf if lowest else -math.inf
    cached = memo.get(id(shape))
    if cached is None:
        values = [_leaf_extreme(c, lowest, memo) for c in shape.children]
        cached = min(values) if lowest else max(values)
        memo[id(shape)] = cached
    return cached


class _TrieNode:
    __slots__ = ("weight", "children", "is_leaf")

    def __init__(self) -> None:
        self.weight = 0.0
        self.children: dict[int, _TrieNode] | None = None
        self.is_leaf = False


class _Trie:
    """Overlay of cube weights below standard-lattice frame cells."""

    def __init__(self, frame_level: int, dimension: int | None) -> None:
        self.frame_level = frame_level
        self.roots: dict[Index, _TrieNode] = {}
        self.dimension = dimension

    def insert(self, cube: DyadicCube, weight: float, exclusive: bool) -> None:
        if cube.lattice != 0:
            raise ParameterError(f"step functions live on the standard lattice, got {cube}")
        if self.dimension is None:
            self.dimension = cube.dimension
        elif cube.dimension != self.dimension:
            raise ParameterError("cubes of different dimensions in one function")
        frame = cube.ancestor(self.frame_level - cube.level)
        node = self.roots.setdefault(frame.index, _TrieNode())
        for bit in cube_path(cube, self.frame_level):
            if exclusive and node.is_leaf:
                raise ParameterError(f"leaf {cube} overlaps another leaf")
            if node.children is None:
                node.children = {}
            node = node.children.setdefault(bit, _TrieNode())
        if exclusive and (node.is_leaf or node.children):
            raise ParameterError(f"leaf {cube} overlaps another leaf")
        node.is_leaf = exclusive
        node.weight += weight

    def build(self, outside_value: float) -> StepFunction:
        dimension = self.dimension or 1
        cells = {
            j: _trie_shape(node, outside_value, dimension) for j, node in self.roots.items()
        }
        return StepFunction(dimension, self.frame_level, cells, outside_value)


def _trie_shape(node: _TrieNode, acc: float, dimension: int) -> Shape:
    total = acc + node.weight
    if not node.children:
        return leaf(total)
    children = []
    for number in range(1 << dimension):
        child = node.children.get(number)
        children.append(leaf(total) if child is None else _trie_shape(child, total, dimension))
    return split(children)
