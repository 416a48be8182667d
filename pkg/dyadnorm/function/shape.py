"""Hash-consed dyadic subtree shapes.

A shape describes a function (or density) on one cube, relative to that cube:
a constant leaf, a split into 2^n child shapes, or the self-similar marker that
stands for the corner child of an affine self-similar continuation. Shapes are
interned, so structurally equal subtrees are the same object and every
aggregate is computed once per distinct subtree.
"""

from __future__ import annotations

import math
import weakref
from collections.abc import Callable, Sequence
from enum import StrEnum

from dyadnorm.errors import ParameterError


class ShapeKind(StrEnum):
    LEAF = "leaf"
    SPLIT = "split"
    MARKER = "marker"


class Shape:
    __slots__ = ("kind", "value", "children", "nodes", "depth", "has_marker", "__weakref__")

    kind: ShapeKind
    value: float
    children: tuple[Shape, ...]
    nodes: int
    depth: int
    has_marker: bool

    def __init__(self, kind: ShapeKind, value: float, children: tuple[Shape, ...]) -> None:
        self.kind = kind
        self.value = value
        self.children = children
        if children:
            self.nodes = 1 + sum(c.nodes for c in children)
            self.depth = 1 + max(c.depth for c in children)
            self.has_marker = any(c.has_marker for c in children)
        else:
            self.nodes = 1
            self.depth = 0
            self.has_marker = kind is ShapeKind.MARKER

    @property
    def is_leaf(self) -> bool:
        return self.kind is ShapeKind.LEAF

    @property
    def is_split(self) -> bool:
        return self.kind is ShapeKind.SPLIT

    @property
    def is_marker(self) -> bool:
        return self.kind is ShapeKind.MARKER

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"Shape(leaf={self.value!r})"
        if self.is_marker:
            return "Shape(marker)"
        return f"Shape(split, nodes={self.nodes}, depth={self.depth})"


# entries go when the last function holding the shape is dropped; a split keeps its children alive
_TABLE: weakref.WeakValueDictionary[tuple[object, ...], Shape] = weakref.WeakValueDictionary()


def leaf(value: float) -> Shape:
    value = float(value)
    if math.isnan(value):
        raise ParameterError("leaf values must not be NaN")
    if value == 0.0:
        value = 0.0
    key = ("L", value)
    shape = _TABLE.get(key)
    if shape is None:
        shape = Shape(ShapeKind.LEAF, value, ())
        _TABLE[key] = shape
    return shape


MARKER = Shape(ShapeKind.MARKER, 0.0, ())
ZERO = leaf(0.0)
ONE = leaf(1.0)


def split(children: Sequence[Shape]) -> Shape:
    """Node with 2^n children; child number bit i selects the upper half on axis i."""
    count = len(children)
    if count < 2 or count & (count - 1):
        raise ParameterError(f"a split needs 2^n >= 2 children, got {count}")
    key = ("S", tuple(id(c) for c in children))
    shape = _TABLE.get(key)
    if shape is None:
        shape = Shape(ShapeKind.SPLIT, 0.0, tuple(children))
        _TABLE[key] = shape
    return shape


def uniform_split(child: Shape, dimension: int) -> Shape:
    return split([child] * (1 << dimension))


def map_leaves(shape: Shape, fn: Callable[[float], float], memo: dict[int, Shape]) -> Shape:
    """Apply ``fn`` to every leaf value; the marker is left in place."""
    cached = memo.get(id(shape))
    if cached is not None:
        return cached
    if shape.is_leaf:
        out = leaf(fn(shape.value))
    elif shape.is_marker:
        out = shape
    else:
        out = split([map_leaves(c, fn, memo) for c in shape.children])
    memo[id(shape)] = out
    return out


def deepen(shape: Shape, levels: int, dimension: int, memo: dict[tuple[int, int], Shape]) -> Shape:
    """Split every leaf until it sits ``levels`` below the shape's root."""
    if levels <= 0:
        return shape
    key = (id(shape), levels)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if shape.is_leaf:
        out = uniform_split(deepen(shape, levels - 1, dimension, memo), dimension)
    elif shape.is_marker:
        raise ParameterError("cannot refine through a self-similar marker")
    else:
        out = split([deepen(c, levels - 1, dimension, memo) for c in shape.children])
    memo[key] = out
    return out


def distinct_nodes(shape: Shape) -> int:
    """Number of distinct interned nodes reachable from ``shape``."""
    seen: set[int] = set()
    stack = [shape]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.extend(node.children)
    return len(seen)
