"""Bi-parameter weak-type norms over dyadic rectangles Q x Q' of R^n x R^m."""

from __future__ import annotations

import math

import numpy as np

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.dyadic.rectangle import check_exponent_pair
from dyadnorm.errors import BudgetError, ParameterError
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.results import NormResult
from dyadnorm.norms.weak import op_norm, profile_norm
from dyadnorm.profile.models import LambdaProfile, LevelWindow


def check_biparam_exponents(
    p: float, gamma: float, alpha: float, beta: float, alpha2: float, beta2: float
) -> None:
    check_exponent_pair(alpha, beta)
    check_exponent_pair(alpha2, beta2)
    if beta > 0:
        raise ParameterError(f"β must be <= 0, got {beta}")
    if not 0 <= alpha2 < 1:
        raise ParameterError(f"α' must lie in [0, 1), got {alpha2}")
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")
    if not gamma > 0:
        raise ParameterError(f"γ must be positive, got {gamma}")


def dense_grid(f: StepFunction, level: int, max_cells: int) -> tuple[np.ndarray, DyadicCube]:
    """Values of f on the cells of ``level`` filling the smallest cube that holds its support."""
    if f.tail is not None:
        raise ParameterError("dense grids of self-similar functions are not supported")
    if f.outside_value != 0.0:
        raise ParameterError("dense grids need a compactly supported function")
    n = f.dimension
    cells = f.support_cells()
    if not cells:
        return np.zeros((1,) * n), DyadicCube(0, max(level, f.frame_level), (0,) * n)
    if len({tuple(j < 0 for j in c) for c in cells}) > 1:
        raise ParameterError("the support must lie in one coordinate orthant")
    lo = [min(c[i] for c in cells) for i in range(n)]
    hi = [max(c[i] for c in cells) for i in range(n)]
    top = f.frame_level
    while any((a >> (top - f.frame_level)) != (b >> (top - f.frame_level)) for a, b in zip(lo, hi, strict=True)):
        top += 1
    root = DyadicCube(0, top, tuple(a >> (top - f.frame_level) for a in lo))
    level = min(level, f.finest_level)
    side = 1 << (top - level)
    if side**n > max_cells:
        raise BudgetError(f"a dense grid of {side}^{n} cells exceeds the budget {max_cells}")
    grid = np.zeros((side,) * n)
    origin = [j << (top - level) for j in root.index]
    for cube, value in f.leaves(max_leaves=max_cells):
        span = 1 << (cube.level - level)
        start = [(j << (cube.level - level)) - o for j, o in zip(cube.index, origin, strict=True)]
        grid[tuple(slice(s, s + span) for s in start)] = value
    return grid, root


def rectangle_profile(
    f: StepFunction,
    n: int,
    p: float,
    gamma: float,
    alpha: float,
    beta: float,
    alpha2: float,
    beta2: float,
    window: LevelWindow,
    max_cells: int = 1 << 22,
) -> LambdaProfile:
    """Entries (ℓ_{α,β}(R)^{γ/p} |f_R|, ℓ_{α',β'}(R)^{-γ} |R|) for rectangles with both levels in the window."""
    if window.k_min is None or window.k_max is None:
        raise ParameterError("rectangle profiles need a closed level window")
    m = f.dimension - n
    if n < 1 or m < 1:
        raise ParameterError(f"cannot split dimension {f.dimension} into R^{n} x R^{m}")
    if f.is_zero():
        return LambdaProfile(window=window)
    grid, root = dense_grid(f, window.k_min, max_cells)
    g = min(window.k_min, f.finest_level)
    cell_volume = math.ldexp(1.0, g * f.dimension)
    entries: list[tuple[float, float]] = []
    for k1 in range(window.k_min, window.k_max + 1):
        for k2 in range(window.k_min, window.k_max + 1):
            sums = _block_sums(grid, n, k1, k2, g, root.level)
            volume = math.ldexp(1.0, k1 * n + k2 * m)
            means = np.abs(sums.ravel()) * cell_volume / volume
            low, high = min(k1, k2), max(k1, k2)
            scale = 2.0 ** ((alpha * low + beta * high) * gamma / p)
            weight = 2.0 ** (-(alpha2 * low + beta2 * high) * gamma) * volume
            entries.extend((float(v) * scale, weight) for v in means[means > 0])
    return LambdaProfile.from_entries(
        entries,
        window=window,
        complete=False,
        notes=("rectangles outside the window are not enumerated",),
    )


def biparam_weak_norm(
    f: StepFunction,
    n: int,
    p: float,
    gamma: float,
    alpha: float,
    beta: float,
    alpha2: float,
    beta2: float,
    window: LevelWindow,
    mu: DyadicMeasure | None = None,
    squares_only: bool = False,
    settings: DyadnormSettings | None = None,
) -> NormResult:
    """(sup λ^p sum over |a(f)_R| > λ of ℓ_{α',β'}(R)^{-γ} |R|)^{1/p} with a(f)_R = ℓ_{α,β}(R)^{γ/p} f_R."""
    check_biparam_exponents(p, gamma, alpha, beta, alpha2, beta2)
    if mu is not None and not mu.is_lebesgue:
        raise ParameterError("bi-parameter norms are computed for Lebesgue measure")
    settings = settings or load_settings()
    if squares_only:
        result = op_norm(f, None, p, gamma, gamma, "mean", window, settings=settings)
        result.details["squares_only"] = True
        return result
    profile = rectangle_profile(
        f, n, p, gamma, alpha, beta, alpha2, beta2, window, max_cells=settings.max_nodes
    )
    details: dict[str, object] = {
        "p": p,
        "gamma": gamma,
        "alpha": alpha,
        "beta": beta,
        "alpha2": alpha2,
        "beta2": beta2,
        "split": [n, f.dimension - n],
    }
    return profile_norm(profile, p, "biparam", settings, details)


def _block_sums(grid: np.ndarray, n: int, k1: int, k2: int, g: int, top: int) -> np.ndarray:
    """Sums of grid cells over the blocks of levels k1 (first n axes) and k2 (the rest)."""
    side = grid.shape[0]
    shape: list[int] = []
    for axis in range(grid.ndim):
        k = k1 if axis < n else k2
        block = side if k >= top else 1 << (k - g)
        shape.extend((side // block, block))
    return grid.reshape(shape).sum(axis=tuple(range(1, 2 * grid.ndim, 2)))
