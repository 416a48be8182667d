"""Dyadic John-Nirenberg JN_p norms by tree dynamic programming over antichains.

best(Q) = max(|Q| O(f,Q)^p, sum of best over the children), evaluated once per
distinct (function, density) subtree and scaled by volume. Inside an affine
self-similar corner the recursion closes on itself; the least fixed point of
that equation is solved in closed form.
"""

from __future__ import annotations

import math
from typing import Literal

from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.errors import ParameterError, RangeError
from dyadnorm.function.field import Field, Pair
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.results import NormResult

Weights = Literal["lebesgue", "mu"]

_MAX_WITNESS = 256
_ANCESTOR_LEVELS = 4096


class AntichainTree:
    """Relative JN_p optimum per node pair: best(pair) * |Q| is the optimum over the cube."""

    def __init__(self, field: Field, p: float, weights: Weights = "lebesgue") -> None:
        if not p > 1:
            raise ParameterError(f"JN_p needs p > 1, got {p}")
        self.field = field
        self.p = p
        self.weights = weights
        self._own: dict[tuple[int, int], float] = {}
        self._best: dict[tuple[int, int], float] = {}

    def own(self, pair: Pair) -> float:
        key = (id(pair[0]), id(pair[1]))
        cached = self._own.get(key)
        if cached is None:
            if Field.is_constant(pair):
                cached = 0.0
            else:
                dist = self.field.full(pair)
                scale = dist.total_mass if self.weights == "mu" else 1.0
                cached = scale * dist.oscillation() ** self.p
            self._own[key] = cached
        return cached

    def best(self, pair: Pair) -> float:
        key = (id(pair[0]), id(pair[1]))
        cached = self._best.get(key)
        if cached is not None:
            return cached
        if Field.is_constant(pair):
            self._best[key] = 0.0
            return 0.0
        own = self.own(pair)
        share = 2.0**-self.field.dimension
        children = self.field.child_pairs(pair)
        tail = self.field.f.tail
        if tail is not None and children[tail.corner][0].is_marker:
            ring = share * sum(self.best(c) for i, c in enumerate(children) if i != tail.corner)
            factor = share * tail.scale**self.p
            if factor < 1:
                out = max(own, ring / (1.0 - factor))
            else:
                out = math.inf if ring > 0 else own
        else:
            out = max(own, share * sum(self.best(c) for c in children))
        self._best[key] = out
        return out

    def cube_best(self, cube: DyadicCube) -> float:
        pair, _, b = self.field.node(cube.level, cube.index)
        return abs(b) ** self.p * self.best(pair) * float(cube.volume)

    def cube_own(self, cube: DyadicCube) -> float:
        pair, _, b = self.field.node(cube.level, cube.index)
        return abs(b) ** self.p * self.own(pair) * float(cube.volume)

    def witness(self, root: DyadicCube, limit: int = _MAX_WITNESS) -> tuple[list[DyadicCube], bool]:
        """An optimal antichain below ``root`` (ties to the larger cube); flag set when cut at limit."""
        out: list[DyadicCube] = []
        stack = [root]
        while stack:
            cube = stack.pop()
            pair, _, _ = self.field.node(cube.level, cube.index)
            best = self.best(pair)
            if best == 0:
                continue
            own = self.own(pair)
            if own > 0 and own >= best * (1 - 1e-12):
                out.append(cube)
                if len(out) >= limit:
                    return out, True
                continue
            try:
                stack.extend(reversed(cube.children()))
            except RangeError:
                return out, True
        return out, False


def jnp_dyadic(
    f: StepFunction,
    Q0: DyadicCube | None,  # noqa: N803
    p: float,
    mu: DyadicMeasure | None = None,
    weights: Weights = "lebesgue",
) -> NormResult:
    """||f||_{JN_p(Q0, D(Q0))}, or over the whole standard lattice when Q0 is None."""
    if Q0 is not None and (Q0.lattice != 0 or Q0.dimension != f.dimension):
        raise ParameterError(f"JN_p is computed over standard-lattice cubes of R^{f.dimension}, got {Q0}")
    if f.outside_value != 0.0:
        f = f.shifted(-f.outside_value)
    tree = AntichainTree(Field(f, mu), p, weights)
    details: dict[str, object] = {"p": p, "weights": weights}
    if Q0 is not None:
        total = tree.cube_best(Q0)
        roots = [Q0]
        details["scope"] = format_cube(Q0)
        exactness = "exact"
    else:
        total, roots, settled = _global_best(tree)
        exactness = "exact" if settled else "truncated"
    witness: list[str] = []
    cut = False
    if math.isfinite(total):
        for root in roots:
            cubes, cut_here = tree.witness(root, _MAX_WITNESS - len(witness))
            witness.extend(format_cube(q) for q in cubes)
            cut = cut or cut_here
    if cut:
        details["witness_truncated"] = True
    return NormResult(
        norm="JN_p",
        value=total ** (1.0 / p) if math.isfinite(total) else math.inf,
        exactness=exactness,
        witness=witness,
        details=details,
    )


def _global_best(tree: AntichainTree) -> tuple[float, list[DyadicCube], bool]:
    """Sum over orthant groups of the best antichain below the group root or one of its ancestors."""
    field = tree.field
    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for index in field.content_cells():
        groups.setdefault(tuple(1 if j < 0 else 0 for j in index), []).append(index)
    total = 0.0
    roots: list[DyadicCube] = []
    settled = True
    for _, cells in sorted(groups.items()):
        root = _group_root(field.frame_level, cells)
        best = tree.cube_best(root)
        top = root
        cube = root
        for level in range(_ANCESTOR_LEVELS):
            try:
                cube = cube.parent()
            except RangeError:
                settled = False
                break
            own = tree.cube_own(cube)
            if own > best:
                best, top = own, cube
            if level >= 8 and own < 1e-12 * best:
                break
        else:
            settled = False
        total += best
        roots.append(top)
    return total, roots, settled


def _group_root(frame_level: int, cells: list[tuple[int, ...]]) -> DyadicCube:
    level = frame_level
    lo = [min(j[i] for j in cells) for i in range(len(cells[0]))]
    hi = [max(j[i] for j in cells) for i in range(len(cells[0]))]
    while any(a >> (level - frame_level) != b >> (level - frame_level) for a, b in zip(lo, hi, strict=True)):
        level += 1
    shift = level - frame_level
    return DyadicCube(0, level, tuple(a >> shift for a in lo))
