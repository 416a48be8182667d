"""Far-apart interval families f_M = sum a_I χ_I and their Lipschitz-bump variant (E6).

Group k holds N_k intervals of length ℓ_k = 2^{-j_k} carrying a_I = k^{p'-1}.
Every interval owns a private slot: its N-th ancestor for the step variant, a
dyadic interval containing its 5^N dilate for the bump variant. Slots are
packed left to right in decreasing size, so every slot is aligned and the
family is described by one shape per group plus the run boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.dyadic.cube import INDEX_BITS, DyadicCube
from dyadnorm.errors import PlacementError, VerificationError
from dyadnorm.function.shape import ZERO, Shape, leaf, split, uniform_split
from dyadnorm.function.step import StepFunction
from dyadnorm.profile.evaluate import profile_sup
from dyadnorm.profile.models import LambdaProfile


@dataclass(frozen=True)
class SparseGroup:
    k: int
    count: int
    level: int
    value: float
    slot_level: int
    start: int

    @property
    def length(self) -> float:
        return math.ldexp(1.0, self.level)

    def slot_units(self, unit_level: int) -> int:
        return 1 << (self.slot_level - unit_level)


@dataclass(frozen=True)
class SparsePlacement:
    groups: tuple[SparseGroup, ...]
    separation: int
    unit_level: int
    region_level: int
    bumps: bool
    bump_depth: int = 0
    sup_error: float = 0.0
    slope: float = 0.0

    @property
    def total_units(self) -> int:
        last = self.groups[-1]
        return last.start + last.count * last.slot_units(self.unit_level)

    @property
    def interval_count(self) -> int:
        return sum(g.count for g in self.groups)

    def offset(self, group: SparseGroup) -> int:
        """Position of the interval inside its slot, in units of its own length."""
        if not self.bumps:
            return 0
        return 1 << (group.slot_level - group.level - 1)


def p_conjugate(p: float) -> float:
    return p / (p - 1.0)


def sparse_groups(spec: ExampleSpec) -> list[tuple[int, int, int, float]]:
    """(k, N_k, j_k, a_k) with 2^{kp'/γ} k^{-p'} <= N_k < that + 1 and ℓ_k = 2^{-j_k}."""
    assert spec.p is not None and spec.gamma is not None and spec.truncation is not None
    pc = p_conjugate(spec.p)
    out = []
    for k in range(1, spec.truncation + 1):
        x = k * pc / spec.gamma
        j = math.floor(x)
        count = max(1, math.ceil(2.0**x * k**-pc))
        out.append((k, count, j, float(k) ** (pc - 1.0)))
    return out


def slot_depth(spec: ExampleSpec) -> int:
    """Levels between an interval and its slot."""
    if spec.variant != "tilde":
        return spec.separation
    # smallest s with 2^s >= 5^N + 1
    return (5**spec.separation).bit_length()


def place_groups(spec: ExampleSpec) -> SparsePlacement:
    depth = slot_depth(spec)
    rows = sparse_groups(spec)
    ordered = sorted(rows, key=lambda r: (r[2], r[0]))
    unit_level = min(depth - j for _, _, j, _ in rows)
    groups: list[SparseGroup] = []
    offset = 0
    for k, count, j, value in ordered:
        slot_level = depth - j
        size = 1 << (slot_level - unit_level)
        if offset % size:
            raise VerificationError(
                f"slot run of group {k} starts at {offset}, not a multiple of {size}",
                {"group": k, "offset": offset, "size": size},
            )
        groups.append(SparseGroup(k, count, -j, value, slot_level, offset))
        offset += count * size
    region_level = unit_level + max(0, (offset - 1).bit_length())
    finest = min(g.level for g in groups)
    if region_level - finest > INDEX_BITS:
        raise PlacementError(
            f"M={spec.truncation} with separation {spec.separation} needs indices of "
            f"{region_level - finest} bits; at most {INDEX_BITS} are supported"
        )
    placement = SparsePlacement(tuple(groups), spec.separation, unit_level, region_level, False)
    if spec.variant == "tilde":
        bump = bump_values(spec.depth)
        placement = SparsePlacement(
            placement.groups,
            spec.separation,
            unit_level,
            region_level,
            True,
            spec.depth,
            bump_sup_error(spec.depth),
            bump_slope(bump),
        )
    return placement


def bump_values(depth: int) -> np.ndarray:
    """Cell-midpoint values of the trapezoid min(1, 4u, 4(1-u)) on 2^depth cells of [0, 1)."""
    mid = (np.arange(1 << depth, dtype=np.float64) + 0.5) / (1 << depth)
    return np.clip(np.minimum(4 * mid, 4 * (1 - mid)), 0.0, 1.0)


def bump_sup_error(depth: int) -> float:
    """sup |trapezoid - staircase|; the kinks at 1/4 and 3/4 fall on cell edges."""
    cells = 1 << depth
    edges = np.arange(cells + 1, dtype=np.float64) / cells
    exact = np.clip(np.minimum(4 * edges, 4 * (1 - edges)), 0.0, 1.0)
    values = bump_values(depth)
    return float(max(np.abs(exact[:-1] - values).max(), np.abs(exact[1:] - values).max()))


def bump_slope(values: np.ndarray) -> float:
    """Largest jump between neighbouring cells (zero outside) per cell width, relative to 1/ℓ."""
    padded = np.concatenate([[0.0], values, [0.0]])
    return float(np.abs(np.diff(padded)).max() * values.size)


def sparse_example(spec: ExampleSpec) -> tuple[StepFunction, SparsePlacement]:
    placement = place_groups(spec)
    slots = {g.k: _slot_shape(g, placement) for g in placement.groups}
    root = _region_shape(placement, slots)
    f = StepFunction(1, placement.region_level, {(0,): root})
    certify_placement(f, placement, spec)
    return f, placement


def _interval_shape(group: SparseGroup, placement: SparsePlacement) -> Shape:
    if not placement.bumps:
        return leaf(group.value)
    values = group.value * bump_values(placement.bump_depth)
    return StepFunction.from_array(values, DyadicCube(0, group.level, (0,))).cells[(0,)]


def _slot_shape(group: SparseGroup, placement: SparsePlacement) -> Shape:
    shape = _interval_shape(group, placement)
    depth = group.slot_level - group.level
    if placement.bumps:
        for _ in range(depth - 1):
            shape = split([shape, ZERO])
        return split([ZERO, shape])
    for _ in range(depth):
        shape = split([shape, ZERO])
    return shape


def _region_shape(placement: SparsePlacement, slots: dict[int, Shape]) -> Shape:
    unit = placement.unit_level
    runs = [
        (g.start, g.start + g.count * g.slot_units(unit), g) for g in placement.groups
    ]
    full: dict[tuple[int, int], Shape] = {}

    def filled(group: SparseGroup, levels: int) -> Shape:
        key = (group.k, levels)
        cached = full.get(key)
        if cached is None:
            cached = slots[group.k] if levels == 0 else uniform_split(filled(group, levels - 1), 1)
            full[key] = cached
        return cached

    def build(level: int, lo: int) -> Shape:
        hi = lo + (1 << (level - unit))
        touching = [r for r in runs if r[0] < hi and lo < r[1]]
        if not touching:
            return ZERO
        if len(touching) == 1:
            start, stop, group = touching[0]
            if start <= lo and hi <= stop and level >= group.slot_level:
                return filled(group, level - group.slot_level)
        half = 1 << (level - 1 - unit)
        return split([build(level - 1, lo), build(level - 1, lo + half)])

    return build(placement.region_level, 0)


def certify_placement(f: StepFunction, placement: SparsePlacement, spec: ExampleSpec) -> None:
    """Exact checks: aligned disjoint runs, private slots, and the interval values in place."""
    unit = placement.unit_level
    previous_end = 0
    for g in placement.groups:
        size = g.slot_units(unit)
        if g.start % size or g.start < previous_end:
            raise VerificationError(f"slot run of group {g.k} misplaced", {"group": g.k, "start": g.start})
        previous_end = g.start + g.count * size
        if placement.bumps:
            reach = (5**placement.separation - 1) // 2
            inside = 1 << (g.slot_level - g.level)
            position = placement.offset(g)
            if position - reach < 0 or position + 1 + reach > inside:
                raise VerificationError(
                    f"the 5^N dilate of a group-{g.k} interval leaves its slot",
                    {"group": g.k, "reach": reach, "slot": inside},
                )
        for slot in (0, g.count - 1):
            interval = _interval_cube(g, placement, slot)
            owner = interval.ancestor(g.slot_level - g.level)
            expected = DyadicCube(0, g.slot_level, ((g.start >> (g.slot_level - unit)) + slot,))
            if owner != expected:
                raise VerificationError(
                    f"interval {interval} is not alone in its slot",
                    {"interval": str(interval), "slot": str(expected)},
                )
            lo, hi = interval.bounds()[0]
            middle = (lo + hi) / 2
            if f.value_at((middle,)) != g.value:
                raise VerificationError(
                    f"f is not a_I on {interval}", {"interval": str(interval), "value": g.value}
                )
            if f.value_at((lo - Fraction(1, 2) * (hi - lo),)) != 0.0:
                raise VerificationError(
                    f"the slot of {interval} is not empty next to it", {"interval": str(interval)}
                )
    if previous_end > 1 << (placement.region_level - unit):
        raise VerificationError("slots overflow the region", {"end": previous_end})
    if spec.truncation is not None and len(placement.groups) != spec.truncation:
        raise VerificationError("missing groups", {"groups": len(placement.groups)})


def _interval_cube(group: SparseGroup, placement: SparsePlacement, slot: int) -> DyadicCube:
    slot_index = (group.start >> (group.slot_level - placement.unit_level)) + slot
    shift = group.slot_level - group.level
    return DyadicCube(0, group.level, ((slot_index << shift) + placement.offset(group),))


def a_quantity(placement: SparsePlacement, p: float, gamma: float) -> float:
    """A = (sup λ^p sum over a_I ℓ^{γ/p} > λ of ℓ^{1-γ})^{1/p} of the interval data."""
    entries = [
        (g.value * g.length ** (gamma / p), g.count * g.length ** (1.0 - gamma))
        for g in placement.groups
    ]
    return profile_sup(LambdaProfile.from_entries(entries), p) ** (1.0 / p)


def level_threshold(spec: ExampleSpec) -> float:
    """λ = m^{p'-1} with m = floor(M/2)."""
    assert spec.p is not None and spec.truncation is not None
    m = max(1, spec.truncation // 2)
    return float(m) ** (p_conjugate(spec.p) - 1.0)


def level_set_bound(placement: SparsePlacement, threshold: float) -> float:
    """sum of N_k ℓ_k over the groups with a_k > threshold."""
    return math.fsum(g.count * g.length for g in placement.groups if g.value > threshold)
