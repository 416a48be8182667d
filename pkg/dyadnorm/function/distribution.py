"""Value distributions of a function over a region, with exact self-similar parts."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from dyadnorm.errors import ParameterError

_NEGLIGIBLE = 1e-18
_MAX_RECURSION = 4096


@dataclass(frozen=True, eq=False)
class TailModel:
    """Distribution of f over a self-similar anchor A, normalised to mass 1.

    A splits into the ring A \\ C (finite values, mass 1 - 2^-n) and the corner C
    (mass 2^-n) on which f = offset + scale * F with F distributed like A.
    """

    ring_values: np.ndarray
    ring_masses: np.ndarray
    offset: float
    scale: float
    dimension: int

    @property
    def corner_mass(self) -> float:
        return 2.0**-self.dimension

    @property
    def ring_min(self) -> float:
        return float(self.ring_values.min())

    @property
    def mean(self) -> float:
        ring_integral = float(self.ring_values @ self.ring_masses)
        q = self.corner_mass
        return (ring_integral + q * self.offset) / (1.0 - q * self.scale)

    def ring_abs(self, x: float) -> float:
        return float(np.abs(self.ring_values - x) @ self.ring_masses)

    def abs_deviation(self, x: float) -> float:
        """Integral of |F - x| over A (mass 1)."""
        total = 0.0
        factor = 1.0
        cur = x
        mean = self.mean
        ratio = self.corner_mass * self.scale
        for _ in range(_MAX_RECURSION):
            if cur <= self.ring_min:
                return total + factor * (mean - cur)
            total += factor * self.ring_abs(cur)
            factor *= ratio
            cur = (cur - self.offset) / self.scale
            if factor < _NEGLIGIBLE * max(total, 1e-300):
                return total + factor * abs(mean - cur)
        return total + factor * abs(mean - cur)


@dataclass(frozen=True)
class TailPart:
    """mass copies of a + b * F, F distributed like the self-similar anchor."""

    mass: float
    a: float
    b: float
    model: TailModel

    @property
    def mean(self) -> float:
        return self.a + self.b * self.model.mean

    def abs_deviation(self, c: float) -> float:
        if self.b == 0:
            return self.mass * abs(self.a - c)
        return self.mass * abs(self.b) * self.model.abs_deviation((c - self.a) / self.b)


_EMPTY = np.zeros(0, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Distinct values (ascending) with positive masses, plus exact self-similar parts.

    Masses are relative to the volume of the region the distribution describes.
    """

    values: np.ndarray = field(default_factory=lambda: _EMPTY)
    masses: np.ndarray = field(default_factory=lambda: _EMPTY)
    tails: tuple[TailPart, ...] = ()

    @classmethod
    def empty(cls) -> Distribution:
        return cls()

    @classmethod
    def point(cls, value: float, mass: float) -> Distribution:
        if mass <= 0:
            return cls()
        return cls(np.array([value], dtype=np.float64), np.array([mass], dtype=np.float64))

    @classmethod
    def tail(cls, mass: float, a: float, b: float, model: TailModel) -> Distribution:
        return cls(tails=(TailPart(mass, a, b, model),))

    @classmethod
    def from_samples(cls, values: Iterable[float], masses: Iterable[float]) -> Distribution:
        return cls.merge([(cls(np.asarray(list(values), float), np.asarray(list(masses), float)), 1.0)])

    @classmethod
    def merge(cls, parts: Iterable[tuple[Distribution, float]]) -> Distribution:
        """Union of the parts, part i with its masses multiplied by its weight."""
        value_chunks = []
        mass_chunks = []
        tails: dict[tuple[float, float, int], TailPart] = {}
        for dist, weight in parts:
            if weight == 0:
                continue
            if dist.values.size:
                value_chunks.append(dist.values)
                mass_chunks.append(dist.masses * weight)
            for t in dist.tails:
                key = (t.a, t.b, id(t.model))
                prev = tails.get(key)
                mass = t.mass * weight + (prev.mass if prev is not None else 0.0)
                tails[key] = TailPart(mass, t.a, t.b, t.model)
        if not value_chunks:
            return cls(tails=tuple(tails.values()))
        values = np.concatenate(value_chunks)
        masses = np.concatenate(mass_chunks)
        unique, inverse = np.unique(values, return_inverse=True)
        summed = np.bincount(inverse, weights=masses, minlength=unique.size)
        keep = summed > 0
        return cls(unique[keep], summed[keep], tuple(tails.values()))

    # ---- aggregates ---------------------------------------------------------

    @property
    def has_tail(self) -> bool:
        return bool(self.tails)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum()) + sum(t.mass for t in self.tails)

    @property
    def integral(self) -> float:
        return float(self.values @ self.masses) + sum(t.mass * t.mean for t in self.tails)

    def mean(self) -> float:
        """Average over the region; 0 on a region of zero mass."""
        total = self.total_mass
        return self.integral / total if total > 0 else 0.0

    def abs_deviation(self, c: float) -> float:
        """Integral of |f - c| (relative masses)."""
        out = float(np.abs(self.values - c) @ self.masses)
        return out + sum(t.abs_deviation(c) for t in self.tails)

    def mean_abs_deviation(self, c: float) -> float:
        total = self.total_mass
        return self.abs_deviation(c) / total if total > 0 else 0.0

    def oscillation(self) -> float:
        """Mean oscillation: average of |f - mean|; 0 on a region of zero mass."""
        total = self.total_mass
        if total <= 0:
            return 0.0
        if not self.tails and self.values.size <= 1:
            return 0.0
        return max(self.abs_deviation(self.mean()) / total, 0.0)

    # ---- transforms ---------------------------------------------------------

    def scaled(self, weight: float) -> Distribution:
        return Distribution.merge([(self, weight)])

    def affine(self, a: float, b: float) -> Distribution:
        """Distribution of a + b * f."""
        if a == 0 and b == 1:
            return self
        tails = tuple(TailPart(t.mass, a + b * t.a, b * t.b, t.model) for t in self.tails)
        if b == 0:
            mass = float(self.masses.sum())
            base = Distribution.point(a, mass)
            return Distribution(base.values, base.masses, tails)
        values = a + b * self.values
        masses = self.masses
        if b < 0:
            values = values[::-1]
            masses = masses[::-1]
        return Distribution.merge([(Distribution(values, masses, tails), 1.0)])

    def absolute(self) -> Distribution:
        if self.tails:
            # F >= 0 on the anchor, so a, b >= 0 keeps every tail part nonnegative
            if self.values.min(initial=0.0) >= 0 and all(t.a >= 0 and t.b >= 0 for t in self.tails):
                return self
            raise ParameterError("absolute values of a sign-changing self-similar part")
        return Distribution.merge([(Distribution(np.abs(self.values), self.masses), 1.0)])

    # ---- level sets ---------------------------------------------------------

    def _finite(self, what: str) -> None:
        if self.tails:
            raise ParameterError(f"{what} is not available for self-similar distributions")

    def mass_above(self, threshold: float, strict: bool = True) -> float:
        """Mass of {f > threshold} (or >= when not strict)."""
        self._finite("level-set mass")
        mask = self.values > threshold if strict else self.values >= threshold
        return float(self.masses[mask].sum())

    def quantile_threshold(self, fraction: float) -> float:
        """Smallest |value| v with mass(|f| > v) <= fraction (relative masses)."""
        dist = self.absolute()
        if not dist.values.size:
            return 0.0
        above = dist.masses[::-1].cumsum()[::-1] - dist.masses
        candidates = dist.values[above <= fraction]
        return float(candidates[0]) if candidates.size else float(dist.values[-1])

    def weak_norm(self, p: float, volume: float = 1.0) -> float:
        """max over v of v * mu(|f| >= v)^(1/p); masses scaled by ``volume``."""
        self._finite("weak L^p")
        if p < 1:
            raise ParameterError(f"p must be at least 1, got {p}")
        dist = self.absolute()
        if not dist.values.size:
            return 0.0
        values = dist.values[::-1]
        tail_mass = np.cumsum(dist.masses[::-1]) * volume
        return float(np.max(values * tail_mass ** (1.0 / p)))

    def lp_norm(self, p: float, volume: float = 1.0) -> float:
        self._finite("L^p")
        if p < 1:
            raise ParameterError(f"p must be at least 1, got {p}")
        if not self.values.size:
            return 0.0
        return float((np.abs(self.values) ** p @ self.masses * volume) ** (1.0 / p))

    def sup_abs(self) -> float:
        if self.tails:
            return math.inf
        return float(np.abs(self.values).max(initial=0.0))
