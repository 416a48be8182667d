"""Checks of the g-function bounds ||sum ℓ^{-γ/q} χ_Q||_{L^q} <= C (sum ℓ^{-γ} mu(Q))^{1/q}."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from dyadnorm.dyadic.collection import CubeCollection, generation_partition
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.dyadic.rectangle import DyadicRectangle, check_exponent_pair, mean_sidelength
from dyadnorm.errors import BudgetError, ParameterError
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.lebesgue import lp_norm


@dataclass(frozen=True)
class GFunctionCheck:
    lhs: float
    rhs: float
    generations: int

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0
        return self.lhs / self.rhs


def gfunction_check(
    collection: CubeCollection,
    gamma: float,
    q: float,
    mu: DyadicMeasure | None = None,
) -> GFunctionCheck:
    """Exact lhs through the cell decomposition of g = sum ℓ(Q)^{-γ/q} χ_Q."""
    _check(gamma, q)
    cubes = collection.sorted()
    if not cubes:
        return GFunctionCheck(0.0, 0.0, 0)
    if cubes[0].lattice != 0:
        raise ParameterError("g-function checks use standard-lattice cubes")
    g = StepFunction.from_cube_weights((c, c.side ** (-gamma / q)) for c in cubes)
    lhs = lp_norm(g, mu, q).value
    field = Field(StepFunction.zero(g.dimension), mu)
    total = sum(c.side**-gamma * field.mass(c) for c in cubes)
    return GFunctionCheck(lhs, total ** (1.0 / q), len(generation_partition(collection)))


def rectangle_gfunction_check(
    rectangles: Iterable[DyadicRectangle],
    gamma: float,
    q: float,
    delta: float,
    epsilon: float,
    delta2: float,
    epsilon2: float,
    max_cubes: int = 200_000,
) -> GFunctionCheck:
    """Bi-parameter variant: g = sum ℓ_{δ,ε}(R)^{-γ/q} χ_R against sum ℓ_{δ',ε'}(R)^{-γ} |R|."""
    _check(gamma, q)
    check_exponent_pair(delta, epsilon)
    check_exponent_pair(delta2, epsilon2)
    if not gamma > 0:
        raise ParameterError(f"the rectangle bound needs γ > 0, got {gamma}")
    if not epsilon > 0:
        raise ParameterError(f"ε must be positive, got {epsilon}")
    if not (delta2 >= 0 and 0 < epsilon2 < epsilon):
        raise ParameterError(f"need δ' >= 0 and 0 < ε' < ε, got δ'={delta2}, ε'={epsilon2}")
    rects = sorted(set(rectangles))
    if not rects:
        return GFunctionCheck(0.0, 0.0, 0)
    pieces: list[tuple[DyadicCube, float]] = []
    total = 0.0
    for rect in rects:
        height = mean_sidelength(rect, delta, epsilon) ** (-gamma / q)
        total += mean_sidelength(rect, delta2, epsilon2) ** -gamma * float(rect.volume)
        for cube in _product_cubes(rect):
            pieces.append((cube, height))
            if len(pieces) > max_cubes:
                raise BudgetError(f"rectangles split into more than {max_cubes} cubes")
    g = StepFunction.from_cube_weights(pieces)
    lhs = lp_norm(g, None, q).value
    return GFunctionCheck(lhs, total ** (1.0 / q), 0)


def _product_cubes(rect: DyadicRectangle) -> list[DyadicCube]:
    """R = Q x Q' as cubes of R^{n+m} with side ℓ_min(R)."""
    level = rect.level_min
    out: list[list[int]] = [[]]
    for factor in (rect.first, rect.second):
        shift = factor.level - level
        span = 1 << shift
        for j in factor.index:
            out = [prefix + [(j << shift) + t] for prefix in out for t in range(span)]
    return [DyadicCube(0, level, tuple(index)) for index in out]


def _check(gamma: float, q: float) -> None:
    if gamma == 0:
        raise ParameterError("the g-function bound needs γ != 0")
    if not q > 1:
        raise ParameterError(f"q must exceed 1, got {q}")
