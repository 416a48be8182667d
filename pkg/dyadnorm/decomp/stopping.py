"""Calderón-Zygmund stopping cubes."""

from __future__ import annotations

from dyadnorm.dyadic.collection import CubeCollection
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import BudgetError, ParameterError
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction


def select_maximal(
    field: Field,
    root: DyadicCube,
    center: float,
    threshold: float,
    include_root: bool,
    max_cubes: int = 200_000,
) -> list[DyadicCube]:
    """Maximal subcubes Q of ``root`` with the average of |f - center| over Q above ``threshold``."""
    selected: list[DyadicCube] = []
    stack = [root] if include_root else list(reversed(_split(field, root)))
    visited = 0
    while stack:
        cube = stack.pop()
        visited += 1
        if visited > max_cubes:
            raise BudgetError(f"stopping-time search visited more than {max_cubes} cubes")
        if field.mean_abs_deviation(cube, center) > threshold:
            selected.append(cube)
            continue
        stack.extend(reversed(_split(field, cube)))
    return selected


def cz_stopping(
    f: StepFunction,
    Q0: DyadicCube,  # noqa: N803
    lam: float,
    mu: DyadicMeasure | None = None,
    max_cubes: int = 200_000,
) -> CubeCollection:
    """Maximal dyadic subcubes Q of Q0 (Q0 included) with mean(|f - f_{Q0}|, Q) > λ."""
    if not lam > 0:
        raise ParameterError(f"λ must be positive, got {lam}")
    if Q0.lattice != 0:
        raise ParameterError(f"stopping cubes are taken in the standard lattice, got {Q0}")
    field = Field(f, mu)
    center = field.mean(Q0)
    return CubeCollection.from_cubes(select_maximal(field, Q0, center, lam, True, max_cubes))


def _split(field: Field, cube: DyadicCube) -> list[DyadicCube]:
    """Children of the cube, or none when f and mu are constant on it."""
    pair, _, _ = field.node(cube.level, cube.index)
    if Field.is_constant(pair):
        return []
    return cube.children()
