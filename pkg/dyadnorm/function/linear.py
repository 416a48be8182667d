"""Continuous piecewise-linear functions on the line, F = anchor + integral of a step derivative."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import ParameterError
from dyadnorm.function.step import StepFunction


@dataclass(frozen=True, eq=False)
class PiecewiseLinear1D:
    """F(x) = anchor + int_{x0}^{x} g, constant left of x0 and right of the support of g."""

    derivative: StepFunction
    anchor: float = 0.0
    breaks: np.ndarray = field(init=False, repr=False)
    heights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        g = self.derivative
        if g.dimension != 1:
            raise ParameterError(f"derivative must be one-dimensional, got dimension {g.dimension}")
        if g.outside_value != 0.0:
            raise ParameterError("derivative must be compactly supported (outside value 0)")
        pieces = sorted((float(q.bounds()[0][0]), float(q.bounds()[0][1]), v) for q, v in g.leaves())
        breaks = [pieces[0][0]] if pieces else [0.0]
        heights = [self.anchor]
        for lo, hi, slope in pieces:
            if lo > breaks[-1]:
                breaks.append(lo)
                heights.append(heights[-1])
            breaks.append(hi)
            heights.append(heights[-1] + slope * (hi - lo))
        object.__setattr__(self, "breaks", np.asarray(breaks, dtype=np.float64))
        object.__setattr__(self, "heights", np.asarray(heights, dtype=np.float64))

    @classmethod
    def from_slopes(cls, slopes: list[tuple[DyadicCube, float]], anchor: float = 0.0) -> PiecewiseLinear1D:
        return cls(StepFunction.from_leaves(slopes, dimension=1), anchor)

    @property
    def left(self) -> float:
        return float(self.breaks[0])

    @property
    def right(self) -> float:
        return float(self.breaks[-1])

    def value(self, x: float) -> float:
        return float(np.interp(x, self.breaks, self.heights))

    def _pieces(self, lo: float, hi: float) -> list[tuple[float, float, float, float]]:
        """(a, b, F(a), F(b)) over the linear pieces of [lo, hi)."""
        cuts = [lo]
        start = bisect.bisect_right(self.breaks.tolist(), lo)
        for x in self.breaks[start:]:
            if x >= hi:
                break
            cuts.append(float(x))
        cuts.append(hi)
        return [(a, b, self.value(a), self.value(b)) for a, b in zip(cuts, cuts[1:], strict=False) if b > a]

    def interval_mean(self, lo: float, hi: float) -> float:
        if hi <= lo:
            raise ParameterError(f"empty interval [{lo}, {hi})")
        total = sum((u + w) / 2 * (b - a) for a, b, u, w in self._pieces(lo, hi))
        return total / (hi - lo)

    def interval_oscillation(self, lo: float, hi: float) -> float:
        """Average of |F - F_I| over I = [lo, hi), exact per linear piece."""
        m = self.interval_mean(lo, hi)
        total = 0.0
        for a, b, u, w in self._pieces(lo, hi):
            du, dw = u - m, w - m
            if du * dw >= 0:
                total += abs(du + dw) / 2 * (b - a)
            else:
                total += (du * du + dw * dw) / (2 * abs(w - u)) * (b - a)
        return max(total / (hi - lo), 0.0)

    def cube_oscillation(self, cube: DyadicCube) -> float:
        ((lo, hi),) = cube.bounds()
        return self.interval_oscillation(float(lo), float(hi))
