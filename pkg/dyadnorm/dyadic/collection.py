"""Finite collections of cubes of one lattice: maximal, minimal and generation structure."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import ParameterError


@dataclass(frozen=True)
class CubeCollection:
    cubes: frozenset[DyadicCube]

    @classmethod
    def from_cubes(cls, cubes: Iterable[DyadicCube]) -> CubeCollection:
        cube_set = frozenset(cubes)
        lattices = {q.lattice for q in cube_set}
        dimensions = {q.dimension for q in cube_set}
        if len(lattices) > 1:
            raise ParameterError(f"collection mixes lattices {sorted(lattices)}")
        if len(dimensions) > 1:
            raise ParameterError(f"collection mixes dimensions {sorted(dimensions)}")
        return cls(cube_set)

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self) -> Iterator[DyadicCube]:
        return iter(self.sorted())

    def __contains__(self, cube: object) -> bool:
        return cube in self.cubes

    def contains_cube(self, cube: DyadicCube) -> bool:
        return cube in self.cubes

    def sorted(self) -> list[DyadicCube]:
        """Largest cubes first, then by index."""
        return sorted(self.cubes, key=lambda q: (-q.level, q.index))

    @cached_property
    def top_level(self) -> int:
        return max((q.level for q in self.cubes), default=0)

    def strict_ancestors_in(self, cube: DyadicCube) -> list[DyadicCube]:
        """Members of the collection strictly containing ``cube``, nearest first."""
        found = []
        current = cube
        for _ in range(self.top_level - cube.level):
            current = current.parent()
            if current in self.cubes:
                found.append(current)
        return found

    @cached_property
    def generation_index(self) -> dict[DyadicCube, int]:
        """1 + the number of strict ancestors of each cube inside the collection."""
        return {q: 1 + len(self.strict_ancestors_in(q)) for q in self.cubes}

    @cached_property
    def is_disjoint(self) -> bool:
        return all(g == 1 for g in self.generation_index.values())

    def maximal(self) -> CubeCollection:
        return CubeCollection(frozenset(q for q, g in self.generation_index.items() if g == 1))

    def minimal(self) -> CubeCollection:
        covering: set[DyadicCube] = set()
        for q in self.cubes:
            covering.update(self.strict_ancestors_in(q))
        return CubeCollection(self.cubes - covering)

    def generations(self) -> list[CubeCollection]:
        """P_1 = maximal cubes, P_k = maximal cubes of what remains after P_1..P_{k-1}."""
        by_generation: dict[int, set[DyadicCube]] = {}
        for q, g in self.generation_index.items():
            by_generation.setdefault(g, set()).add(q)
        return [CubeCollection(frozenset(by_generation[g])) for g in sorted(by_generation)]

    @cached_property
    def union_volume(self) -> Fraction:
        return sum((q.volume for q in self.maximal().cubes), Fraction(0))


def maximal_subcollection(collection: CubeCollection) -> CubeCollection:
    return collection.maximal()


def minimal_subcollection(collection: CubeCollection) -> CubeCollection:
    return collection.minimal()


def generation_partition(collection: CubeCollection) -> list[CubeCollection]:
    return collection.generations()
