"""Means and oscillations over Euclidean balls."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from dyadnorm.dyadic.family import Ball
from dyadnorm.errors import AccuracyError, ParameterError
from dyadnorm.function.field import Field

_START_GRID = 8


@dataclass(frozen=True)
class BallStatistic:
    value: float
    error: float
    exactness: Literal["exact", "quadrature"]
    samples: int = 0


def ball_statistics(
    field: Field,
    ball: Ball,
    tolerance: float = 1e-6,
    max_samples: int = 1 << 16,
) -> tuple[BallStatistic, BallStatistic]:
    """(mean, oscillation) of f over B with respect to mu."""
    if ball.dimension != field.dimension:
        raise ParameterError(f"ball of dimension {ball.dimension} for a {field.dimension}-D field")
    if field.dimension == 1:
        c, r = Fraction(ball.center[0]), Fraction(ball.radius)
        dist = field.box_distribution((c - r,), (c + r,))
        return (
            BallStatistic(dist.mean(), 0.0, "exact"),
            BallStatistic(dist.oscillation(), 0.0, "exact"),
        )
    return _midpoint_statistics(field, ball, tolerance, max_samples)


def ball_mean(field: Field, ball: Ball, tolerance: float = 1e-6, max_samples: int = 1 << 16) -> BallStatistic:
    return ball_statistics(field, ball, tolerance, max_samples)[0]


def ball_oscillation(
    field: Field, ball: Ball, tolerance: float = 1e-6, max_samples: int = 1 << 16
) -> BallStatistic:
    return ball_statistics(field, ball, tolerance, max_samples)[1]


def _midpoint_statistics(
    field: Field, ball: Ball, tolerance: float, max_samples: int
) -> tuple[BallStatistic, BallStatistic]:
    n = field.dimension
    previous: tuple[float, float] | None = None
    grid = _START_GRID
    while grid**n <= max_samples:
        mean, osc = _grid_estimate(field, ball, grid)
        if previous is not None:
            err_mean = abs(mean - previous[0])
            err_osc = abs(osc - previous[1])
            if max(err_mean, err_osc) <= tolerance:
                samples = grid**n
                return (
                    BallStatistic(mean, err_mean, "quadrature", samples),
                    BallStatistic(osc, err_osc, "quadrature", samples),
                )
        previous = (mean, osc)
        grid *= 2
    raise AccuracyError(
        f"ball quadrature did not reach tolerance {tolerance} within {max_samples} samples"
    )


def _grid_estimate(field: Field, ball: Ball, grid: int) -> tuple[float, float]:
    n = field.dimension
    center = np.asarray(ball.center, dtype=np.float64)
    r = ball.radius
    offsets = (np.arange(grid) + 0.5) * (2 * r / grid) - r
    mesh = np.stack(np.meshgrid(*([offsets] * n), indexing="ij"), axis=-1).reshape(-1, n)
    inside = mesh[np.einsum("ij,ij->i", mesh, mesh) < r * r] + center
    if not inside.shape[0]:
        raise AccuracyError(f"no quadrature nodes inside {ball} at grid {grid}")
    values = np.array([field.f.value_at(tuple(x)) for x in inside])
    weights = np.array([field.mu.density.value_at(tuple(x)) for x in inside])
    total = weights.sum()
    if total <= 0:
        return 0.0, 0.0
    mean = float(values @ weights / total)
    osc = float(np.abs(values - mean) @ weights / total)
    return mean, osc
