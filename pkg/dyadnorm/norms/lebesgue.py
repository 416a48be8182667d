"""Strong and weak Lebesgue norms of step functions, exact from value distributions."""

from __future__ import annotations

import math

from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.errors import ParameterError
from dyadnorm.function.distribution import Distribution
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.results import NormResult


def region_distribution(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    scope: DyadicCube | None = None,
    centered: bool = False,
) -> tuple[Distribution, float]:
    """Distribution of f (or f - f_Q) over the scope cube or the whole space, and its volume.

    Masses are relative to the returned volume.
    """
    field = Field(f, mu)
    if scope is not None:
        dist = field.distribution(scope)
        volume = float(scope.volume)
    else:
        if centered:
            raise ParameterError("centring needs a scope cube")
        if f.outside_value != 0.0:
            return Distribution.point(f.outside_value, math.inf), 1.0
        dist = Distribution.merge((field.full(pair), 1.0) for _, pair in field.iter_frame_cubes())
        volume = math.ldexp(1.0, field.frame_level * field.dimension)
    if centered:
        dist = dist.affine(-dist.mean(), 1.0)
    return dist, volume


def lp_norm(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    scope: DyadicCube | None = None,
    centered: bool = False,
) -> NormResult:
    """||f||_{L^p(mu)} over R^n or over a cube; ``centered`` uses f - f_Q."""
    _check_p(p)
    dist, volume = region_distribution(f, mu, scope, centered)
    value = math.inf if math.isinf(dist.total_mass) and dist.values.size else dist.lp_norm(p, volume)
    return NormResult(norm="L^p", value=value, details=_details(p, scope, centered))


def weak_lp_norm(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    scope: DyadicCube | None = None,
    centered: bool = False,
) -> NormResult:
    """sup over v of v * mu({|f| >= v})^{1/p}, attained at a distinct value of |f|."""
    _check_p(p)
    dist, volume = region_distribution(f, mu, scope, centered)
    if math.isinf(dist.total_mass) and dist.values.size:
        return NormResult(norm="L^{p,inf}", value=math.inf, details=_details(p, scope, centered))
    value = dist.weak_norm(p, volume)
    witness = []
    absolute = dist.absolute()
    if absolute.values.size and value > 0:
        above = absolute.masses[::-1].cumsum()[::-1] * volume
        scores = absolute.values * above ** (1.0 / p)
        witness.append(f"v={float(absolute.values[int(scores.argmax())])!r}")
    details = _details(p, scope, centered)
    return NormResult(norm="L^{p,inf}", value=value, witness=witness, details=details)


def _details(p: float, scope: DyadicCube | None, centered: bool) -> dict[str, object]:
    out: dict[str, object] = {"p": p}
    if scope is not None:
        out["scope"] = format_cube(scope)
    if centered:
        out["centered"] = True
    return out


def _check_p(p: float) -> None:
    if not p >= 1:
        raise ParameterError(f"p must be at least 1, got {p}")
