"""Dyadic Garsia-Rodemich functional by an area-indexed knapsack over the cube tree.

For every node the DP keeps the Pareto frontier of (total area, total |Q| O(f,Q))
over antichains inside it; the functional is the best ratio
value / area^{1/p'} on the root frontier. Areas are multiples of the finest
cell volume, so the frontier is exact.
"""

from __future__ import annotations

import math

import numpy as np

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.errors import ParameterError, ResolutionError, VerificationError
from dyadnorm.function.field import Field, Pair
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.jn import jnp_dyadic
from dyadnorm.norms.results import NormResult

Frontier = tuple[np.ndarray, np.ndarray]

_EMPTY_FRONTIER: Frontier = (np.zeros(1), np.zeros(1))
_MAX_WITNESS = 256


class KnapsackTree:
    """Relative frontiers: areas and values divided by the node's volume."""

    def __init__(
        self, field: Field, max_table: int, floor_depth: int | None = None
    ) -> None:
        if field.has_tail:
            raise ParameterError("the Garsia-Rodemich functional of self-similar functions is not supported")
        self.field = field
        self.max_table = max_table
        self.floor_depth = floor_depth
        self._frontiers: dict[tuple[int, int, int], Frontier] = {}

    def own(self, pair: Pair) -> float:
        if Field.is_constant(pair):
            return 0.0
        return self.field.full(pair).oscillation()

    def frontier(self, pair: Pair, depth: int = 0) -> Frontier:
        cut = self.floor_depth is not None and depth >= self.floor_depth
        key = (id(pair[0]), id(pair[1]), depth if self.floor_depth is not None else 0)
        cached = self._frontiers.get(key)
        if cached is not None:
            return cached
        if Field.is_constant(pair):
            out = _EMPTY_FRONTIER
        else:
            own = self.own(pair)
            if cut:
                combined = _EMPTY_FRONTIER
            else:
                combined = self.children_frontier(pair, depth)
            out = _prune(np.append(combined[0], 1.0), np.append(combined[1], own))
        self._frontiers[key] = out
        return out

    def children_frontier(self, pair: Pair, depth: int) -> Frontier:
        share = 2.0**-self.field.dimension
        combined = _EMPTY_FRONTIER
        for child in self.field.child_pairs(pair):
            areas, values = self.frontier(child, depth + 1)
            combined = self._combine(combined, (areas * share, values * share))
        return combined

    def _combine(self, a: Frontier, b: Frontier) -> Frontier:
        size = a[0].size * b[0].size
        if size > self.max_table:
            raise ResolutionError(
                f"area table of {size} entries exceeds the budget {self.max_table}",
                suggested_level=None,
            )
        areas = (a[0][:, None] + b[0][None, :]).ravel()
        values = (a[1][:, None] + b[1][None, :]).ravel()
        return _prune(areas, values)

    def split_target(self, pair: Pair, depth: int, area: float, value: float) -> list[tuple[int, float, float]] | None:
        """Child targets (number, area, value) realising (area, value) on the children."""
        share = 2.0**-self.field.dimension
        states: list[tuple[float, float, tuple[tuple[int, float, float], ...]]] = [(0.0, 0.0, ())]
        for number, child in enumerate(self.field.child_pairs(pair)):
            areas, values = self.frontier(child, depth + 1)
            following: dict[float, tuple[float, float, tuple[tuple[int, float, float], ...]]] = {}
            for s_area, s_value, picks in states:
                for c_area, c_value in zip(areas.tolist(), values.tolist(), strict=True):
                    t_area = s_area + c_area * share
                    if t_area > area:
                        continue
                    t_value = s_value + c_value * share
                    found = following.get(t_area)
                    if found is None or t_value > found[1]:
                        following[t_area] = (t_area, t_value, picks + ((number, c_area, c_value),))
            states = list(following.values())
        for s_area, s_value, picks in states:
            if s_area == area and math.isclose(s_value, value, rel_tol=1e-9, abs_tol=1e-300):
                return list(picks)
        return None

    def witness(self, root: DyadicCube, area: float, value: float) -> list[DyadicCube]:
        out: list[DyadicCube] = []
        stack = [(root, 0, area, value)]
        while stack and len(out) < _MAX_WITNESS:
            cube, depth, a, v = stack.pop()
            if a == 0 or v == 0:
                continue
            pair, _, _ = self.field.node(cube.level, cube.index)
            if a == 1.0 and math.isclose(self.own(pair), v, rel_tol=1e-9):
                out.append(cube)
                continue
            picks = self.split_target(pair, depth, a, v)
            if picks is None:
                continue
            children = cube.children()
            for number, c_area, c_value in reversed(picks):
                stack.append((children[number], depth + 1, c_area, c_value))
        return out


def garo_dyadic(
    f: StepFunction,
    Q0: DyadicCube,  # noqa: N803
    p: float,
    mu: DyadicMeasure | None = None,
    coarse_level: int | None = None,
    settings: DyadnormSettings | None = None,
) -> NormResult:
    """sup over antichains P in D(Q0) of sum |Q| O(f,Q) / (sum |Q|)^{1/p'}.

    With ``coarse_level`` only cubes at or above that level are used; the
    result is then a (lower, upper) bracket with JN_p as the upper bound.
    """
    if not p > 1:
        raise ParameterError(f"the Garsia-Rodemich functional needs p > 1, got {p}")
    if Q0.lattice != 0 or Q0.dimension != f.dimension:
        raise ParameterError(f"GaRo_p is computed over standard-lattice cubes of R^{f.dimension}, got {Q0}")
    settings = settings or load_settings()
    if f.outside_value != 0.0:
        f = f.shifted(-f.outside_value)
    field = Field(f, mu)
    floor_depth = None
    if coarse_level is not None:
        if coarse_level > Q0.level:
            raise ParameterError(f"coarse level {coarse_level} lies above Q0 at level {Q0.level}")
        floor_depth = Q0.level - coarse_level
    tree = KnapsackTree(field, settings.garo_max_table, floor_depth)
    pair, _, b = field.node(Q0.level, Q0.index)
    try:
        areas, values = tree.frontier(pair)
    except ResolutionError as e:
        finest = f.finest_level
        suggestion = (Q0.level + max(finest, Q0.level - 64)) // 2 if coarse_level is None else coarse_level + 1
        raise ResolutionError(f"{e}; retry with coarse_level={suggestion}", suggested_level=suggestion) from None
    p_prime = p / (p - 1.0)
    volume = float(Q0.volume)
    best, best_area, best_value = 0.0, 0.0, 0.0
    for a, v in zip(areas.tolist(), values.tolist(), strict=True):
        if a > 0 and v > 0:
            ratio = volume ** (1.0 / p) * abs(b) * v / a ** (1.0 / p_prime)
            if ratio > best:
                best, best_area, best_value = ratio, a, v
    jn = jnp_dyadic(f, Q0, p, mu)
    if best > jn.value * (1 + 1e-9) + 1e-300:
        raise VerificationError(
            f"GaRo_p {best} exceeds JN_p {jn.value} on {Q0}",
            {"cube": format_cube(Q0), "garo": best, "jnp": jn.value},
        )
    witness = [format_cube(q) for q in tree.witness(Q0, best_area, best_value)] if best > 0 else []
    details: dict[str, object] = {
        "p": p,
        "scope": format_cube(Q0),
        "jnp": jn.value,
        "frontier_size": int(areas.size),
    }
    if coarse_level is not None:
        details["coarse_level"] = coarse_level
        details["lower"] = best
        details["upper"] = jn.value
        return NormResult(norm="GaRo_p", value=best, exactness="truncated", witness=witness, details=details)
    return NormResult(norm="GaRo_p", value=best, witness=witness, details=details)


def _prune(areas: np.ndarray, values: np.ndarray) -> Frontier:
    """Points not dominated by a smaller-or-equal area with at least the same value."""
    order = np.lexsort((-values, areas))
    areas, values = areas[order], values[order]
    running = np.maximum.accumulate(values)
    previous = np.concatenate([[-np.inf], running[:-1]])
    keep = values > previous
    return areas[keep], values[keep]
