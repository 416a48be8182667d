"""Building λ-profiles of scaled cube means and oscillations over a whole dyadic lattice.

The descent walks the lattice level by level. A cube is described by the block
of standard cells it is cut from plus its third-offset per axis; cubes with
equal descriptions have equal statistics and equal subtrees, so each level
keeps one representative per description together with its multiplicity.
Blocks made of constant cells end the descent with closed-form families.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from dyadnorm.dyadic.cube import DyadicCube, parse_cube, point_cube
from dyadnorm.errors import BudgetError, ParameterError, RangeError
from dyadnorm.function.distribution import Distribution
from dyadnorm.function.field import Field, Pair, block_bits, third_box
from dyadnorm.function.linear import PiecewiseLinear1D
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import Index, StepFunction
from dyadnorm.profile.models import (
    FULL_WINDOW,
    DivergenceWitness,
    FamilyKind,
    Kind,
    LambdaProfile,
    LevelWindow,
    TailFamily,
)

Bits = tuple[int, ...]
Block = dict[Bits, Pair]

_CHAIN_STEPS = 400
_CHAIN_TOL = 1e-12
_WITNESS_CUBES = 8


@dataclass
class _Sink:
    entries: dict[float, float] = field(default_factory=dict)
    families: list[TailFamily] = field(default_factory=list)
    complete: bool = True
    notes: list[str] = field(default_factory=list)

    def add(self, value: float, weight: float) -> None:
        if value > 0 and weight > 0:
            self.entries[value] = self.entries.get(value, 0.0) + weight


@dataclass
class _Config:
    count: int
    rep: DyadicCube | None
    t3: tuple[int, ...]
    block: Block


@dataclass(frozen=True)
class ProfileParams:
    kind: Kind
    gamma1: float
    gamma2: float
    p: float

    def __post_init__(self) -> None:
        if not self.p >= 1:
            raise ParameterError(f"p must be at least 1, got {self.p}")
        if self.kind not in ("mean", "osc"):
            raise ParameterError(f"kind must be 'mean' or 'osc', got {self.kind!r}")

    def value_scale(self, level: int) -> float:
        return 2.0 ** (level * self.gamma1 / self.p)

    def weight_scale(self, level: int, dimension: int) -> float:
        return 2.0 ** (level * (dimension - self.gamma2))


class ProfileBuilder:
    """λ-profile of a(f)_Q = ℓ^{γ1/p} f_Q or b(f)_Q = ℓ^{γ1/p} O(f, Q), weights ℓ^{-γ2} mu(Q)."""

    def __init__(
        self,
        f: StepFunction,
        mu: DyadicMeasure | None,
        params: ProfileParams,
        window: LevelWindow = FULL_WINDOW,
        lattice: int = 0,
        max_configs: int = 200_000,
    ) -> None:
        self.params = params
        self.window = window
        self.lattice = lattice
        self.max_configs = max_configs
        self.outside_value = f.outside_value
        if params.kind == "osc" and f.outside_value != 0.0:
            f = f.shifted(-f.outside_value)
        self.field = Field(f, mu)
        self.dimension = self.field.dimension
        # raises for bad lattice ids
        DyadicCube(lattice, 0, (0,) * self.dimension)
        if self.field.has_tail and params.kind == "mean":
            raise ParameterError("mean profiles of functions with a self-similar tail are not supported")
        if self.field.has_tail and lattice != 0:
            raise ParameterError("shifted-lattice profiles of self-similar functions are not supported")

    # ---- public ---------------------------------------------------------------

    def build_local(self, root: DyadicCube) -> LambdaProfile:
        """Profile over the dyadic subcubes of ``root`` (root included)."""
        if root.dimension != self.dimension:
            raise ParameterError(f"{root} has the wrong dimension")
        sink = _Sink()
        t3, block = self._config_for(root)
        self._descend({self._key(t3, block): _Config(1, root, t3, block)}, root.level, sink)
        return self._finish(sink)

    def build_full(self) -> LambdaProfile:
        """Profile over every cube of the lattice."""
        if self.params.kind == "mean" and self.outside_value != 0.0:
            witness = DivergenceWitness(
                reason=f"nonzero outside value {self.outside_value}: every level holds "
                "infinitely many cubes with the same mean",
                lower_value=abs(self.outside_value) * 0.5,
            )
            return LambdaProfile(divergence=witness, window=self.window)
        sink = _Sink()
        for root in self.roots():
            t3, block = self._config_for(root)
            self._descend({self._key(t3, block): _Config(1, root, t3, block)}, root.level, sink)
            self._chain(root, sink)
        return self._finish(sink)

    def roots(self) -> list[DyadicCube]:
        """One cube per aligned-axis orthant group, the smallest containing that group's content."""
        n = self.dimension
        digits = DyadicCube(self.lattice, 0, (0,) * n).digits
        side = Fraction(2) ** self.field.frame_level
        groups: dict[tuple[int, ...], list[list[Fraction]]] = {}
        for index in self.field.content_cells():
            key = tuple(1 if j < 0 else 0 for j, d in zip(index, digits, strict=True) if d == 0)
            lo = [j * side for j in index]
            hi = [(j + 1) * side for j in index]
            box = groups.get(key)
            if box is None:
                groups[key] = [lo, hi]
            else:
                box[0] = [min(a, b) for a, b in zip(box[0], lo, strict=True)]
                box[1] = [max(a, b) for a, b in zip(box[1], hi, strict=True)]
        out = []
        for key in sorted(groups):
            lo, hi = groups[key]
            level = self.field.frame_level
            while True:
                cube = point_cube(self.lattice, level, lo)
                if all(b <= c_hi for (_, c_hi), b in zip(cube.bounds(), hi, strict=True)):
                    out.append(cube)
                    break
                level += 1
        return out

    # ---- statistics -------------------------------------------------------------

    def _stat(self, dist: Distribution) -> float:
        if self.params.kind == "mean":
            return abs(dist.mean())
        return dist.oscillation()

    def _entry(self, level: int, dist: Distribution) -> tuple[float, float]:
        value = self.params.value_scale(level) * self._stat(dist)
        weight = self.params.weight_scale(level, self.dimension) * dist.total_mass
        return value, weight

    # ---- configurations ---------------------------------------------------------------

    def _config_for(self, cube: DyadicCube) -> tuple[tuple[int, ...], Block]:
        view = self.field.view(cube)
        block: Block = {}
        for bits in block_bits(view.t3):
            index = tuple(m + b for m, b in zip(view.base, bits, strict=True))
            pair, a, b = self.field.node(cube.level, index)
            if (a, b) != (0.0, 1.0):
                raise ParameterError(f"{cube} lies inside the self-similar corner")
            block[bits] = pair
        return view.t3, block

    @staticmethod
    def _key(t3: tuple[int, ...], block: Block) -> tuple[object, ...]:
        return (t3, tuple((bits, id(pair[0]), id(pair[1])) for bits, pair in block.items()))

    def _distribution(self, t3: tuple[int, ...], block: Block) -> Distribution:
        if not any(t3):
            return self.field.full(block[(0,) * self.dimension])
        return Distribution.merge(
            (self.field.part(pair, third_box(t3, bits)), 1.0) for bits, pair in block.items()
        )

    def _is_dead(self, block: Block) -> bool:
        pairs = list(block.values())
        if not all(Field.is_constant(pair) for pair in pairs):
            return False
        values = {pair[0].value for pair in pairs}
        if self.params.kind == "osc":
            return len(values) == 1
        return values == {0.0}

    def _anchor_pair(self, t3: tuple[int, ...], block: Block) -> Pair | None:
        if not self.field.has_tail or any(t3):
            return None
        pair = block[(0,) * self.dimension]
        fs = pair[0]
        if fs.is_split and any(c.is_marker for c in fs.children):
            return pair
        return None

    def _child(self, config: _Config, number: int) -> tuple[tuple[int, ...], Block]:
        t3 = config.t3
        first = []
        child_t3 = []
        for axis, t in enumerate(t3):
            c = (number >> axis) & 1
            if t == 0:
                first.append(c)
                child_t3.append(0)
            else:
                first.append(c + (2 * t) // 3)
                child_t3.append((2 * t) % 3)
        new_t3 = tuple(child_t3)
        block: Block = {}
        for bits in block_bits(new_t3):
            q = [f + b for f, b in zip(first, bits, strict=True)]
            parent_bits = tuple(v // 2 for v in q)
            child_number = sum((v % 2) << axis for axis, v in enumerate(q))
            block[bits] = self.field.child_pairs(config.block[parent_bits])[child_number]
        return new_t3, block

    # ---- descent -------------------------------------------------------------------

    def _descend(self, start: dict[tuple[object, ...], _Config], level: int, sink: _Sink) -> None:
        configs = start
        k = level
        n = self.dimension
        while configs:
            if self.window.k_min is not None and k < self.window.k_min:
                sink.complete = False
                sink.notes.append(f"descent stopped below level {self.window.k_min}")
                return
            if len(configs) > self.max_configs:
                raise BudgetError(
                    f"{len(configs)} distinct cube configurations at level {k}, budget is {self.max_configs}"
                )
            following: dict[tuple[object, ...], _Config] = {}
            for config in configs.values():
                if self._is_dead(config.block):
                    continue
                anchor = self._anchor_pair(config.t3, config.block)
                if anchor is not None:
                    self._self_similar(k, anchor, config, sink)
                    continue
                dist = self._distribution(config.t3, config.block)
                value, weight = self._entry(k, dist)
                if self.window.contains(k):
                    sink.add(value, weight * config.count)
                elif value > 0:
                    sink.complete = False
                if all(Field.is_constant(pair) for pair in config.block.values()):
                    sink.families.extend(self._leaf_families(k, config))
                    continue
                for number in range(1 << n):
                    t3, block = self._child(config, number)
                    key = self._key(t3, block)
                    found = following.get(key)
                    if found is None:
                        following[key] = _Config(config.count, _child_rep(config.rep, number), t3, block)
                    else:
                        found.count += config.count
            configs = following
            k -= 1

    def _leaf_families(self, level: int, config: _Config) -> list[TailFamily]:
        """Closed-form families for all strict subcubes of a cube cut from constant cells."""
        n = self.dimension
        t3 = config.t3
        step = 2 if any(t3) else 1
        gamma1, gamma2, p = self.params.gamma1, self.params.gamma2, self.params.p
        out = []
        for r0 in range(1, step + 1):
            axis_types = [_axis_types(t, r0) for t in t3]
            for combo in itertools.product(*axis_types):
                values = []
                masses = []
                for choice in itertools.product(*(sorted(kind.fractions.items()) for kind in combo)):
                    bits = tuple(b for b, _ in choice)
                    share = math.prod(w for _, w in choice)
                    fs, ms = config.block[bits]
                    values.append(fs.value)
                    masses.append(ms.value * share)
                dist = Distribution.from_samples(values, masses)
                stat = self._stat(dist)
                if stat == 0 or dist.total_mass == 0:
                    continue
                poly = np.array([1.0])
                for kind in combo:
                    poly = np.convolve(poly, np.asarray(kind.poly))
                origin = level - r0
                base = 2.0 ** (origin * (n - gamma2)) * dist.total_mass * float(config.count)
                terms = tuple(
                    (
                        float(coef) * 2.0 ** (d * r0) * base,
                        (2.0**d * 2.0 ** (-(n - gamma2))) ** step,
                    )
                    for d, coef in enumerate(poly)
                    if coef != 0
                )
                if step == 1:
                    family_kind = FamilyKind.BELOW_LEAF_MEAN
                elif any(kind.name == "S" for kind in combo):
                    family_kind = FamilyKind.STRADDLE
                else:
                    family_kind = FamilyKind.INTERIOR
                out.append(
                    TailFamily(
                        kind=family_kind,
                        a0=2.0 ** (origin * gamma1 / p) * stat,
                        value_ratio=2.0 ** (-step * gamma1 / p),
                        terms=terms,
                        origin_level=origin,
                        level_step=-step,
                        cube=str(config.rep) if config.rep is not None else "",
                    )
                )
        return out

    def _self_similar(self, level: int, pair: Pair, config: _Config, sink: _Sink) -> None:
        """Anchor A: the cubes of A outside the corner, then their images under the continuation."""
        tail = self.field.f.tail
        model = self.field.tail_model
        assert tail is not None and model is not None
        n = self.dimension
        ring = _Sink()
        ring.add(*self._entry(level, self.field.full(pair)))
        start: dict[tuple[object, ...], _Config] = {}
        zero = (0,) * n
        for number, child in enumerate(self.field.child_pairs(pair)):
            if number == tail.corner:
                continue
            block = {zero: child}
            key = self._key(zero, block)
            found = start.get(key)
            if found is None:
                start[key] = _Config(1, _child_rep(config.rep, number), zero, block)
            else:
                found.count += 1
        self._descend(start, level - 1, ring)
        if ring.families:
            raise ParameterError("self-similar rings with their own tail families are not supported")
        if not ring.complete:
            sink.complete = False
        value_ratio = model.scale * 2.0 ** (-self.params.gamma1 / self.params.p)
        weight_ratio = 2.0 ** (self.params.gamma2 - n)
        corners = _corner_chain(config.rep, tail.corner)
        for value, weight in ring.entries.items():
            sink.add(value, weight * config.count)
            sink.families.append(
                TailFamily(
                    kind=FamilyKind.SELF_SIMILAR,
                    a0=value * value_ratio,
                    value_ratio=value_ratio,
                    terms=((weight * config.count * weight_ratio, weight_ratio),),
                    origin_level=level - 1,
                    level_step=-1,
                    cube=corners[1] if len(corners) > 1 else "",
                )
            )

    # ---- ancestors -----------------------------------------------------------------

    def _chain(self, root: DyadicCube, sink: _Sink) -> None:
        def stat(cube: DyadicCube) -> tuple[float, float]:
            return self._entry(cube.level, self.field.distribution(cube))

        ancestor_chain(root, stat, self.dimension, self.params, sink)

    # ---- result --------------------------------------------------------------------

    def _finish(self, sink: _Sink) -> LambdaProfile:
        return finish_profile(sink, self.window)


def ancestor_chain(
    root: DyadicCube,
    stat: Callable[[DyadicCube], tuple[float, float]],
    dimension: int,
    params: ProfileParams,
    sink: _Sink,
) -> None:
    """Strict ancestors of ``root`` until the value and weight ratios settle, then a family."""
    target_v = 2.0 ** (params.gamma1 / params.p - dimension)
    target_w = 2.0 ** (dimension - params.gamma2)
    cube = root
    previous: tuple[float, float] | None = None
    for _ in range(_CHAIN_STEPS):
        try:
            cube = cube.parent()
        except RangeError:
            break
        value, weight = stat(cube)
        if value == 0:
            return
        sink.add(value, weight)
        if previous is not None and previous[0] > 0:
            if _settled(value / previous[0], target_v) and _settled(weight / previous[1], target_w):
                sink.families.append(
                    TailFamily(
                        kind=FamilyKind.ANCESTOR_CHAIN,
                        a0=value * target_v,
                        value_ratio=target_v,
                        terms=((weight * target_w, target_w),),
                        origin_level=cube.level + 1,
                        level_step=1,
                        cube=str(cube),
                    )
                )
                return
        previous = (value, weight)
    sink.complete = False
    sink.notes.append(f"ancestor chain above {root} did not settle")


def finish_profile(sink: _Sink, window: LevelWindow) -> LambdaProfile:
    divergence = None
    for family in sink.families:
        if family.is_finite or family.value_ratio < 1 - 1e-12:
            continue
        _, rho_star = family.dominant
        if rho_star >= 1 - 1e-12:
            cubes = (family.cube,) if family.cube else ()
            if family.kind is FamilyKind.SELF_SIMILAR and family.cube:
                cubes = tuple(_corner_chain_from_text(family.cube))
            divergence = DivergenceWitness(
                reason=f"{family.kind} family with value ratio {family.value_ratio:.6g} "
                f"and weight ratio {rho_star:.6g} has infinite weight above {family.a0:.6g}",
                cubes=cubes,
                lower_value=family.a0,
            )
            break
    return LambdaProfile.from_entries(
        sink.entries.items(),
        families=sink.families,
        window=window,
        complete=sink.complete,
        divergence=divergence,
        notes=sink.notes,
    )


# ---- public entry points -------------------------------------------------------------


def build_profile(
    f: StepFunction,
    mu: DyadicMeasure | None,
    kind: Kind,
    gamma1: float,
    gamma2: float,
    p: float,
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
    lattice: int = 0,
    max_configs: int = 200_000,
) -> LambdaProfile:
    builder = ProfileBuilder(f, mu, ProfileParams(kind, gamma1, gamma2, p), window, lattice, max_configs)
    if scope is not None:
        return builder.build_local(scope)
    return builder.build_full()


def build_mean_profile(
    f: StepFunction,
    mu: DyadicMeasure | None,
    gamma1: float,
    gamma2: float,
    p: float,
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
    lattice: int = 0,
) -> LambdaProfile:
    return build_profile(f, mu, "mean", gamma1, gamma2, p, window, scope, lattice)


def build_osc_profile(
    f: StepFunction,
    mu: DyadicMeasure | None,
    gamma1: float,
    gamma2: float,
    p: float,
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
    lattice: int = 0,
) -> LambdaProfile:
    return build_profile(f, mu, "osc", gamma1, gamma2, p, window, scope, lattice)


def build_linear_osc_profile(
    F: PiecewiseLinear1D,  # noqa: N803
    gamma1: float,
    gamma2: float,
    p: float,
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
) -> LambdaProfile:
    """Oscillation profile of a continuous piecewise-linear F on the standard lattice of the line."""
    params = ProfileParams("osc", gamma1, gamma2, p)
    g = F.derivative
    sink = _Sink()

    def stat(cube: DyadicCube) -> tuple[float, float]:
        level = cube.level
        return params.value_scale(level) * F.cube_oscillation(cube), params.weight_scale(level, 1)

    def walk(cube: DyadicCube) -> None:
        stack = [cube]
        while stack:
            q = stack.pop()
            if window.k_min is not None and q.level < window.k_min:
                sink.complete = False
                continue
            value, weight = stat(q)
            if window.contains(q.level):
                sink.add(value, weight)
            slope = _slope_on(g, q)
            if slope is None:
                stack.extend(q.children())
            elif slope != 0:
                origin = q.level - 1
                sink.families.append(
                    TailFamily(
                        kind=FamilyKind.LINEAR,
                        a0=params.value_scale(origin) * abs(slope) * 2.0**origin / 4,
                        value_ratio=2.0 ** (-gamma1 / p - 1),
                        terms=((2.0 * params.weight_scale(origin, 1), 2.0**gamma2),),
                        origin_level=origin,
                        level_step=-1,
                        cube=str(q),
                    )
                )

    if scope is not None:
        if scope.lattice != 0 or scope.dimension != 1:
            raise ParameterError(f"piecewise-linear profiles need a standard-lattice interval, got {scope}")
        walk(scope)
        return finish_profile(sink, window)
    builder_field = Field(g)
    for root in _linear_roots(builder_field):
        walk(root)
        ancestor_chain(root, stat, 1, params, sink)
    return finish_profile(sink, window)


# ---- helpers ----------------------------------------------------------------------------


@dataclass(frozen=True)
class _AxisType:
    name: str
    poly: tuple[float, ...]
    fractions: dict[int, float]


def _axis_types(t3: int, r0: int) -> list[_AxisType]:
    """Subcube positions s = r0 (mod step) levels down, by where they sit on one axis.

    Counts are polynomials in X = 2^s (constant term first).
    """
    if t3 == 0:
        return [_AxisType("A", (0.0, 1.0), {0: 1.0})]
    u = t3 / 3
    u_s = ((t3 * 2**r0) % 3) / 3
    return [
        _AxisType("L", (-(1 - u_s), 1 - u), {0: 1.0}),
        _AxisType("R", (-u_s, u), {1: 1.0}),
        _AxisType("S", (1.0,), {0: 1 - u_s, 1: u_s}),
    ]


def _child_rep(rep: DyadicCube | None, number: int) -> DyadicCube | None:
    if rep is None:
        return None
    try:
        return rep.child(number)
    except RangeError:
        return None


def _corner_chain(rep: DyadicCube | None, corner: int) -> list[str]:
    out = []
    cube = rep
    for _ in range(_WITNESS_CUBES):
        if cube is None:
            break
        out.append(str(cube))
        cube = _child_rep(cube, corner)
    return out


def _corner_chain_from_text(text: str) -> Iterable[str]:
    cube = parse_cube(text)
    parent = cube.parent()
    return _corner_chain(parent, cube.child_number())


def _slope_on(g: StepFunction, cube: DyadicCube) -> float | None:
    """Constant value of g on the cube, or None when g varies there."""
    if cube.level > g.frame_level:
        inside = [j for j in g.cells if cube.contains(DyadicCube(0, g.frame_level, j))]
        if not inside:
            return g.outside_value
        return None
    shape = g.shape_at(cube)
    return shape.value if shape.is_leaf else None


def _linear_roots(field: Field) -> list[DyadicCube]:
    groups: dict[int, list[Index]] = {}
    for index in field.content_cells():
        groups.setdefault(1 if index[0] < 0 else 0, []).append(index)
    roots = []
    for _, cells in sorted(groups.items()):
        lo = min(j[0] for j in cells)
        hi = max(j[0] for j in cells) + 1
        level = field.frame_level
        while True:
            cube = point_cube(0, level, (lo * Fraction(2) ** field.frame_level,))
            ((_, c_hi),) = cube.bounds()
            if hi * Fraction(2) ** field.frame_level <= c_hi:
                roots.append(cube)
                break
            level += 1
    return roots


def _settled(ratio: float, target: float) -> bool:
    return abs(ratio - target) <= _CHAIN_TOL * target
