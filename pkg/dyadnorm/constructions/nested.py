"""Nested collections C_1 ⊃ C_2 ⊃ ... of E2 and E5 as hash-consed shapes.

Every cube of C_{k-1} receives the same placement pattern of q_k cubes of
level -(n_1 + ... + n_k), so one shape per generation describes all
q_1 ... q_k cubes of C_k exactly.
"""

from __future__ import annotations

import bisect
import random
from collections.abc import Sequence
from dataclasses import dataclass

from dyadnorm.constructions.spec import ExampleSpec, sequence_numbers
from dyadnorm.errors import PlacementError
from dyadnorm.function.shape import Shape, leaf, split, uniform_split
from dyadnorm.function.step import StepFunction


@dataclass(frozen=True)
class NestedCollections:
    n_seq: tuple[int, ...]
    q: tuple[int, ...]
    eps: tuple[float, ...]
    coefficients: tuple[float, ...]
    shapes: tuple[Shape, ...]

    @property
    def depths(self) -> tuple[int, ...]:
        """s_k = n_1 + ... + n_k."""
        out, total = [], 0
        for m in self.n_seq:
            total += m
            out.append(total)
        return tuple(out)


def nested_example(spec: ExampleSpec) -> tuple[StepFunction, NestedCollections]:
    assert spec.gamma is not None and spec.p is not None and spec.truncation is not None
    n = spec.n
    n_seq = spec.n_sequence()
    if spec.id == "E2":
        rate = 1 - spec.gamma
        scale = spec.gamma
    else:
        rate = n - spec.gamma
        scale = spec.gamma / spec.p
    qs, eps = sequence_numbers(rate, n_seq)
    rng = random.Random(spec.seed)
    coefficients: list[float] = []
    depth = 0
    for k, m in enumerate(n_seq, start=1):
        depth += m
        c = 2.0 ** (scale * depth)
        if spec.id == "E2":
            assert spec.alpha is not None
            c /= k ** (1 + spec.alpha)
        elif spec.alpha is not None:
            c *= k ** (-spec.alpha / spec.p)
        coefficients.append(c)
    totals = [sum(coefficients[:k]) for k in range(1, len(coefficients) + 1)]

    shapes: list[Shape] = [leaf(totals[-1])]
    for k in range(len(n_seq) - 1, -1, -1):
        fill = totals[k - 1] if k > 0 else 0.0
        pattern = _pattern(spec, n_seq[k], qs[k], rng, k + 1)
        shapes.append(_generation(n, n_seq[k], pattern, shapes[-1], fill, spec.id == "E5"))
    shapes.reverse()
    root = shapes[0]
    f = StepFunction(n, 0, {(0,) * n: root})
    data = NestedCollections(tuple(n_seq), tuple(qs), tuple(eps), tuple(coefficients), tuple(shapes[1:]))
    return f, data


def _pattern(spec: ExampleSpec, m: int, q: int, rng: random.Random, k: int) -> Sequence[int]:
    """Selected positions, in Morton order, among the 2^{n m} (E2) or 2^{n (m-1)} (E5) slots."""
    slots = 1 << (spec.n * (m - 1 if spec.id == "E5" else m))
    if q > slots:
        raise PlacementError(f"generation {k} needs {q} cubes but only {slots} places are free")
    if not spec.shuffle:
        return range(q)
    return sorted(rng.sample(range(slots), q))


def _generation(n: int, m: int, pattern: Sequence[int], inner: Shape, fill: Shape | float, distinct_parents: bool) -> Shape:
    """Shape of one cube of C_{k-1}: ``inner`` on the selected cubes at depth m, ``fill`` elsewhere."""
    fill_shape = fill if isinstance(fill, Shape) else leaf(fill)
    if distinct_parents:
        # the first child of each selected parent at depth m - 1
        inner = split([inner] + [fill_shape] * ((1 << n) - 1))
        m -= 1
    return _place(n, m, pattern, 0, inner, fill_shape, {})


def _place(
    n: int,
    depth: int,
    pattern: Sequence[int],
    offset: int,
    inner: Shape,
    fill: Shape,
    full_memo: dict[int, Shape],
) -> Shape:
    lo = bisect.bisect_left(pattern, offset)
    hi = bisect.bisect_left(pattern, offset + (1 << (n * depth)))
    count = hi - lo
    if count == 0:
        return fill
    if count == 1 << (n * depth):
        return _full(n, depth, inner, full_memo)
    width = 1 << (n * (depth - 1))
    return split(
        [_place(n, depth - 1, pattern, offset + c * width, inner, fill, full_memo) for c in range(1 << n)]
    )


def _full(n: int, depth: int, inner: Shape, memo: dict[int, Shape]) -> Shape:
    cached = memo.get(depth)
    if cached is None:
        cached = inner if depth == 0 else uniform_split(_full(n, depth - 1, inner, memo), n)
        memo[depth] = cached
    return cached


def count_generation(root: Shape, target: Shape, depth: int) -> int:
    """Number of subtrees ``target`` found exactly ``depth`` levels below ``root``."""
    memo: dict[tuple[int, int], int] = {}

    def count(shape: Shape, d: int) -> int:
        if d == 0:
            return 1 if shape is target else 0
        if not shape.is_split:
            return 0
        key = (id(shape), d)
        cached = memo.get(key)
        if cached is None:
            cached = memo[key] = sum(count(c, d - 1) for c in shape.children)
        return cached

    return count(root, depth)
