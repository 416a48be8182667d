"""Continuous weak-type quasi-norms on the upper half-space against the dyadic ones.

For a(x, t) = t^{γ/p} m(f, B(x, t)) with m the mean or the mean oscillation,
the continuous quasi-norm is (sup λ^p ν_γ({a > λ}))^{1/p}. It is bracketed by
the lattice-0 dyadic norm from below (boxes Q x (√n ℓ, 2√n ℓ] are disjoint
and their balls contain Q) and by the maximum over the 3^n shifted lattices
from above (every ball sits in a member cube of side < 12 t). The sampled
estimate evaluates a on a grid of Carleson-box points.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from itertools import product
from typing import Any

from pydantic import BaseModel

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.dyadic.family import Ball, ShiftedLatticeFamily, unit_ball_volume
from dyadnorm.errors import BudgetError, ParameterError
from dyadnorm.function.balls import ball_statistics
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.halfspace.boxes import height_integral
from dyadnorm.norms.weak import op_norm
from dyadnorm.profile.evaluate import profile_sup
from dyadnorm.profile.models import FULL_WINDOW, Kind, LambdaProfile, LevelWindow

Sample = tuple[tuple[float, ...], float, float]

_T_SAMPLES = 4


class HalfspaceEstimate(BaseModel):
    """lower <= continuous norm <= upper; sample_estimate is the gridded value."""

    kind: Kind
    p: float
    gamma: float
    lower: float
    upper: float
    sample_estimate: float
    slack: float
    constants: dict[str, float] = {}
    lattice_norms: list[float] = []
    levels: tuple[int, int] = (0, 0)
    exactness: str = "exact"
    notes: list[str] = []
    samples: list[Sample] = []

    def record(self) -> dict[str, Any]:
        return self.model_dump(exclude={"samples"})


def bracketing_constants(
    n: int, p: float, gamma: float, kind: Kind, density_ratio: float = 1.0
) -> dict[str, float]:
    """Factors with lower = lower_factor * N_0 and upper = upper_factor * max_j N_j.

    ``density_ratio`` is max density / min density of mu.
    """
    omega = unit_ball_volume(n)
    root_n = math.sqrt(n)
    c1 = min(n ** (gamma / (2 * p)), (2 * root_n) ** (gamma / p)) / (omega * (2 * root_n) ** n)
    c1 /= density_ratio
    kappa1 = (1 - 2.0**-gamma) / gamma * n ** (-gamma / 2)
    ball_factor = 12.0**n / omega * density_ratio
    c2 = ball_factor * max(2.0 ** (-gamma / p), 12.0 ** (-gamma / p))
    kappa2 = (12.0**gamma - 2.0**gamma) / gamma
    if kind == "osc":
        c1 /= 2
        c2 *= 2
    return {
        "c1": c1,
        "kappa1": kappa1,
        "c2": c2,
        "kappa2": kappa2,
        "lower_factor": c1 * kappa1 ** (1 / p),
        "upper_factor": c2 * (kappa2 * 3**n) ** (1 / p),
    }


def continuous_weak_norm_bounds(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    gamma: float = 1.0,
    kind: Kind = "mean",
    family: ShiftedLatticeFamily | None = None,
    window: LevelWindow = FULL_WINDOW,
    refine: int = 0,
    settings: DyadnormSettings | None = None,
) -> HalfspaceEstimate:
    """Dyadic bracket and gridded estimate of the continuous quasi-norm of a(f)."""
    if gamma == 0:
        raise ParameterError("ν_γ needs γ != 0")
    if not p >= 1:
        raise ParameterError(f"p must be at least 1, got {p}")
    n = f.dimension
    mu = mu if mu is not None else DyadicMeasure.lebesgue(n)
    if not mu.is_doubling:
        raise ParameterError(
            "ball/cube comparisons need a doubling measure; pass a measure with a doubling constant"
        )
    if kind == "mean" and f.outside_value != 0.0:
        raise ParameterError("mean estimates need a compactly supported function")
    settings = settings or load_settings()
    family = family or ShiftedLatticeFamily(n)
    low, high = mu.density_bounds()
    constants = bracketing_constants(n, p, gamma, kind, high / low)
    notes: list[str] = []

    if kind == "mean" and f.min_value() < 0:
        lower = 0.0
        notes.append("lower bound needs f >= 0; reported as 0")
    else:
        n0 = op_norm(f, mu, p, gamma, gamma, kind, window, settings=settings).value
        lower = constants["lower_factor"] * n0
    g = f.abs() if kind == "mean" else f
    norms = [
        op_norm(g, mu, p, gamma, gamma, kind, window, lattice=j, settings=settings).value
        for j in family.lattices
    ]
    upper = constants["upper_factor"] * max(norms, default=0.0)

    field = Field(f, mu)
    pick = 0 if kind == "mean" else 1

    def statistic(x: tuple[float, ...], t: float) -> float:
        stats = ball_statistics(
            field, Ball(x, t), settings.quadrature_tolerance, settings.quadrature_max_samples
        )
        return abs(stats[pick].value)

    k_lo, k_hi = sample_levels(f, window)
    samples, profile = sample_halfspace(
        statistic, f, mu, gamma, gamma, p, (k_lo, k_hi), refine, settings.max_cubes
    )
    sup = profile_sup(profile, p, settings.max_tail_terms, settings.tail_span_bits)
    estimate = sup ** (1 / p)
    if not window.is_open:
        notes.append(f"profiles and samples restricted to the window {window}")
    return HalfspaceEstimate(
        kind=kind,
        p=p,
        gamma=gamma,
        lower=lower,
        upper=upper,
        sample_estimate=estimate,
        slack=bracket_slack(lower, estimate, upper),
        constants=constants,
        lattice_norms=norms,
        levels=(k_lo, k_hi),
        exactness="exact" if n == 1 else "quadrature",
        notes=notes,
        samples=samples,
    )


def bracket_slack(lower: float, estimate: float, upper: float) -> float:
    """Smallest s >= 1 with lower / s <= estimate <= upper * s."""
    slack = 1.0
    if lower > 0:
        slack = max(slack, lower / estimate if estimate > 0 else math.inf)
    if estimate > 0:
        slack = max(slack, estimate / upper if upper > 0 else math.inf)
    return slack


def sample_levels(f: StepFunction, window: LevelWindow) -> tuple[int, int]:
    """Window levels, closed by default at two levels below the finest leaf and three above the frame."""
    k_lo = window.k_min if window.k_min is not None else f.finest_level - 2
    k_hi = window.k_max if window.k_max is not None else f.frame_level + 3
    if k_lo > k_hi:
        raise ParameterError(f"empty sampling range [{k_lo}, {k_hi}]")
    return k_lo, k_hi


def sample_halfspace(
    statistic: Callable[[tuple[float, ...], float], float],
    f: StepFunction,
    mu: DyadicMeasure,
    gamma1: float,
    gamma2: float,
    p: float,
    levels: tuple[int, int],
    refine: int = 0,
    max_cubes: int = 200_000,
) -> tuple[list[Sample], LambdaProfile]:
    """Sample t^{γ1/p} statistic(x, t) at box points, each carrying its ν_{γ2} mass.

    On every level k the boxes sit over the lattice-0 cubes meeting the
    support of f widened by 2^{k+1}; ``refine`` splits each box into
    2^refine parts per axis and in height.
    """
    n = f.dimension
    lebesgue = mu.is_lebesgue
    mass_field = None if lebesgue else Field(StepFunction.zero(n), mu)
    parts = 1 << refine
    t_parts = _T_SAMPLES * parts
    samples: list[Sample] = []
    entries: list[tuple[float, float]] = []
    visited = 0
    for k in range(levels[0], levels[1] + 1):
        side = math.ldexp(1.0, k)
        for cube in _covering_cubes(f, k):
            visited += 1
            if visited > max_cubes:
                raise BudgetError(f"half-space sampling visits more than {max_cubes} boxes")
            for piece in _pieces(cube, refine):
                mass = float(piece.volume) if mass_field is None else mass_field.mass(piece)
                if mass == 0:
                    continue
                x = tuple(float(lo + hi) / 2 for lo, hi in piece.bounds())
                for i in range(t_parts):
                    t_lo = side * (1 + i / t_parts)
                    t_hi = side * (1 + (i + 1) / t_parts)
                    t = side * (1 + (i + 0.5) / t_parts)
                    a = t ** (gamma1 / p) * statistic(x, t)
                    samples.append((x, t, a))
                    entries.append((a, mass * height_integral(t_lo, t_hi, gamma2)))
    return samples, LambdaProfile.from_entries(entries, complete=False)


def _covering_cubes(f: StepFunction, level: int) -> Iterator[DyadicCube]:
    cells = f.support_cells()
    if not cells:
        return
    n = f.dimension
    frame = math.ldexp(1.0, f.frame_level)
    side = math.ldexp(1.0, level)
    ranges = []
    for axis in range(n):
        lo = min(c[axis] for c in cells) * frame - 2 * side
        hi = (max(c[axis] for c in cells) + 1) * frame + 2 * side
        ranges.append(range(math.floor(lo / side), math.ceil(hi / side)))
    for index in product(*ranges):
        yield DyadicCube(0, level, index)


def _pieces(cube: DyadicCube, refine: int) -> list[DyadicCube]:
    out = [cube]
    for _ in range(refine):
        out = [c for q in out for c in q.children()]
    return out
