"""Seeded random step functions, measures and profiles for the property sweeps."""

from __future__ import annotations

import numpy as np

from dyadnorm.dyadic.cube import DyadicCube, unit_cube
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.profile.models import LambdaProfile


def random_tree_function(
    rng: np.random.Generator,
    dimension: int,
    depth: int,
    split_probability: float = 0.6,
    nonnegative: bool = False,
) -> StepFunction:
    """Random adaptive refinement of [0, 1)^n down to ``depth`` levels with normal leaf values."""
    leaves: list[tuple[DyadicCube, float]] = []
    stack = [unit_cube(dimension)]
    while stack:
        cube = stack.pop()
        if -cube.level < depth and (cube.level == 0 or rng.random() < split_probability):
            stack.extend(cube.children())
            continue
        value = float(rng.normal())
        leaves.append((cube, abs(value) if nonnegative else value))
    return StepFunction.from_leaves(leaves, frame_level=0, dimension=dimension)


def random_grid_function(
    rng: np.random.Generator, dimension: int, depth: int, nonnegative: bool = False
) -> StepFunction:
    """Dense grid of 2^depth cells per axis on [0, 1)^n."""
    values = rng.normal(size=(1 << depth,) * dimension)
    if nonnegative:
        values = np.abs(values)
    return StepFunction.from_array(values, unit_cube(dimension))


def random_density_measure(
    rng: np.random.Generator, dimension: int, depth: int, low: float = 0.5, high: float = 2.0
) -> DyadicMeasure:
    """Density uniform in [low, high] on the cells of [0, 1)^n; doubling with a finite constant."""
    values = rng.uniform(low, high, size=(1 << depth,) * dimension)
    grid = StepFunction.from_array(values, unit_cube(dimension))
    return DyadicMeasure.from_densities(grid.leaves(), dimension)


def random_cubes(
    rng: np.random.Generator, dimension: int, count: int, depth: int
) -> list[DyadicCube]:
    """``count`` standard-lattice subcubes of [0, 1)^n, levels uniform in [-depth, 0]; may repeat."""
    cubes = []
    for _ in range(count):
        level = int(rng.integers(0, depth + 1))
        index = tuple(int(j) for j in rng.integers(0, 1 << level, size=dimension))
        cubes.append(DyadicCube(0, -level, index))
    return cubes


def random_profile(rng: np.random.Generator, size: int) -> LambdaProfile:
    """Log-uniform values and weights over twelve decades."""
    values = 10.0 ** rng.uniform(-6, 6, size=size)
    weights = 10.0 ** rng.uniform(-6, 6, size=size)
    return LambdaProfile.from_entries(zip(values.tolist(), weights.tolist(), strict=True))


def normalized(f: StepFunction, norm: float) -> StepFunction:
    return f if norm == 0 else f.scaled(1.0 / norm)
