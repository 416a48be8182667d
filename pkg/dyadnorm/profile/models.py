"""λ-profile records: finite steps, geometric tail families and divergence witnesses."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import Literal

import numpy as np

from dyadnorm.errors import ParameterError

Kind = Literal["mean", "osc"]

_EMPTY = np.zeros(0, dtype=np.float64)


class FamilyKind(StrEnum):
    BELOW_LEAF_MEAN = "below_leaf_mean"
    ANCESTOR_CHAIN = "ancestor_chain"
    SELF_SIMILAR = "self_similar"
    STRADDLE = "straddle"
    INTERIOR = "interior"
    LINEAR = "linear"


@dataclass(frozen=True)
class LevelWindow:
    """Levels k_min..k_max (inclusive) enumerated explicitly; None leaves a side open."""

    k_min: int | None = None
    k_max: int | None = None

    def __post_init__(self) -> None:
        if self.k_min is not None and self.k_max is not None and self.k_min > self.k_max:
            raise ParameterError(f"window k_min={self.k_min} exceeds k_max={self.k_max}")

    @property
    def is_open(self) -> bool:
        return self.k_min is None and self.k_max is None

    def contains(self, level: int) -> bool:
        if self.k_min is not None and level < self.k_min:
            return False
        return self.k_max is None or level <= self.k_max

    def __str__(self) -> str:
        lo = "-inf" if self.k_min is None else str(self.k_min)
        hi = "+inf" if self.k_max is None else str(self.k_max)
        return f"[{lo}, {hi}]"


FULL_WINDOW = LevelWindow()


@dataclass(frozen=True)
class TailFamily:
    """Cube family with value a0 * value_ratio^r and total weight sum_i c_i * ratio_i^r at step r.

    Step r sits at level origin_level + level_step * r; ``steps`` bounds r when the
    family is cut by a window.
    """

    kind: FamilyKind
    a0: float
    value_ratio: float
    terms: tuple[tuple[float, float], ...]
    origin_level: int
    level_step: int = -1
    steps: int | None = None
    cube: str = ""

    def __post_init__(self) -> None:
        if not self.a0 > 0 or not math.isfinite(self.a0):
            raise ParameterError(f"tail family base value must be positive, got {self.a0}")
        if not self.value_ratio > 0:
            raise ParameterError(f"tail family value ratio must be positive, got {self.value_ratio}")
        if self.steps is not None and self.steps < 0:
            raise ParameterError(f"tail family step count must be nonnegative, got {self.steps}")

    @property
    def is_finite(self) -> bool:
        return self.steps is not None

    @property
    def dominant(self) -> tuple[float, float]:
        """(c*, rho*): the largest weight ratio and the sum of its coefficients."""
        ratios = [rho for c, rho in self.terms if c != 0]
        if not ratios:
            return 0.0, 0.0
        top = max(ratios)
        return sum(c for c, rho in self.terms if rho == top), top

    def value(self, r: int) -> float:
        return self.a0 * self.value_ratio**r

    def weight(self, r: int) -> float:
        return sum(c * rho**r for c, rho in self.terms)

    def level(self, r: int) -> int:
        return self.origin_level + self.level_step * r

    def weight_sum(self, start: int, stop: int | None) -> float:
        """sum of weight(r) for start <= r < stop (stop None: to infinity)."""
        if stop is not None:
            stop = stop if self.steps is None else min(stop, self.steps)
            if stop <= start:
                return 0.0
        elif self.steps is not None:
            return self.weight_sum(start, self.steps)
        total = 0.0
        for c, rho in self.terms:
            if c == 0:
                continue
            if stop is None:
                if rho >= 1:
                    return math.inf
                total += c * rho**start / (1.0 - rho)
            elif rho == 1:
                total += c * (stop - start)
            else:
                total += c * (rho**stop - rho**start) / (rho - 1.0)
        return max(total, 0.0)

    def qualifying(self, lam: float) -> tuple[int, int | None]:
        """Range [start, stop) of steps whose value exceeds lam."""
        a0, rho = self.a0, self.value_ratio
        if rho == 1:
            return (0, self.steps) if a0 > lam else (0, 0)
        if lam <= 0:
            return 0, self.steps
        x = math.log(lam / a0) / math.log(rho)
        if rho < 1:
            stop = max(math.ceil(x), 0)
            while stop > 0 and self.value(stop - 1) <= lam:
                stop -= 1
            while self.value(stop) > lam:
                stop += 1
            if self.steps is not None:
                stop = min(stop, self.steps)
            return 0, stop
        start = max(math.floor(x), 0)
        while start > 0 and self.value(start - 1) > lam:
            start -= 1
        while self.value(start) <= lam:
            start += 1
        return start, self.steps

    def weight_above(self, lam: float) -> float:
        start, stop = self.qualifying(lam)
        return self.weight_sum(start, stop)

    def truncated(self, steps: int) -> TailFamily:
        return replace(self, steps=steps if self.steps is None else min(self.steps, steps))


@dataclass(frozen=True)
class DivergenceWitness:
    """Infinitely many cubes with values >= lower_value > 0 and infinite total weight."""

    reason: str
    cubes: tuple[str, ...] = ()
    lower_value: float = 0.0


@dataclass(frozen=True, eq=False)
class LambdaProfile:
    """W(λ) = sum of weights of entries with value > λ, over steps and tail families."""

    values: np.ndarray = field(default_factory=lambda: _EMPTY)
    weights: np.ndarray = field(default_factory=lambda: _EMPTY)
    families: tuple[TailFamily, ...] = ()
    window: LevelWindow = FULL_WINDOW
    complete: bool = True
    divergence: DivergenceWitness | None = None
    notes: tuple[str, ...] = ()

    @classmethod
    def from_entries(
        cls,
        entries: Iterable[tuple[float, float]],
        families: Iterable[TailFamily] = (),
        window: LevelWindow = FULL_WINDOW,
        complete: bool = True,
        divergence: DivergenceWitness | None = None,
        notes: Iterable[str] = (),
    ) -> LambdaProfile:
        pairs = [(abs(v), w) for v, w in entries if v != 0 and w > 0]
        values, weights = _merge(
            np.asarray([v for v, _ in pairs], dtype=np.float64),
            np.asarray([w for _, w in pairs], dtype=np.float64),
        )
        return cls(values, weights, tuple(families), window, complete, divergence, tuple(notes))

    @property
    def steps(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.weights.tolist(), strict=True))

    @property
    def is_empty(self) -> bool:
        return not self.values.size and not self.families and self.divergence is None

    def W(self, lam: float) -> float:  # noqa: N802
        if lam <= 0:
            raise ParameterError(f"λ must be positive, got {lam}")
        if self.divergence is not None and lam < self.divergence.lower_value:
            return math.inf
        total = float(self.weights[self.values > lam].sum())
        return total + sum(f.weight_above(lam) for f in self.families)

    def merge(self, other: LambdaProfile) -> LambdaProfile:
        values, weights = _merge(
            np.concatenate([self.values, other.values]),
            np.concatenate([self.weights, other.weights]),
        )
        return LambdaProfile(
            values,
            weights,
            self.families + other.families,
            self.window if self.window == other.window else _hull(self.window, other.window),
            self.complete and other.complete,
            self.divergence or other.divergence,
            self.notes + other.notes,
        )


def merge_profiles(profiles: Iterable[LambdaProfile]) -> LambdaProfile:
    out = LambdaProfile()
    for profile in profiles:
        out = out.merge(profile)
    return out


def _merge(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if not values.size:
        return _EMPTY, _EMPTY
    unique, inverse = np.unique(values, return_inverse=True)
    summed = np.bincount(inverse, weights=weights, minlength=unique.size)
    keep = summed > 0
    return unique[keep], summed[keep]


def _hull(a: LevelWindow, b: LevelWindow) -> LevelWindow:
    k_min = None if a.k_min is None or b.k_min is None else min(a.k_min, b.k_min)
    k_max = None if a.k_max is None or b.k_max is None else max(a.k_max, b.k_max)
    return LevelWindow(k_min, k_max)
