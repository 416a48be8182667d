"""Upper Carleson boxes S(Q) = Q x (ℓ(Q), 2ℓ(Q)] and their ν_γ masses, dν_γ = dμ dt / t^{1+γ}."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import AccuracyError, ParameterError
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction


@dataclass(frozen=True)
class CarlesonBox:
    base: DyadicCube

    @property
    def height(self) -> tuple[float, float]:
        side = self.base.side
        return side, 2 * side

    def contains(self, x: tuple[float, ...], t: float) -> bool:
        low, high = self.height
        return low < t <= high and all(
            float(lo) <= c < float(hi) for (lo, hi), c in zip(self.base.bounds(), x, strict=True)
        )


def height_integral(low: float, high: float, gamma: float) -> float:
    """∫_low^high t^{-1-γ} dt."""
    if gamma == 0:
        return math.log(high / low)
    return (low**-gamma - high**-gamma) / gamma


def nu_gamma_box(Q: DyadicCube, gamma: float, mu: DyadicMeasure | None = None) -> float:  # noqa: N803
    """ν_γ(S(Q)) = μ(Q)(ℓ^{-γ} - (2ℓ)^{-γ})/γ."""
    if gamma == 0:
        raise ParameterError("ν_γ boxes need γ != 0")
    mass = _mass(Q, mu)
    low, high = CarlesonBox(Q).height
    return mass * height_integral(low, high, gamma)


def nu_gamma_box_quadrature(
    Q: DyadicCube,  # noqa: N803
    gamma: float,
    mu: DyadicMeasure | None = None,
    tolerance: float = 1e-12,
) -> float:
    """Same mass with the t-integral done by adaptive quadrature."""
    if gamma == 0:
        raise ParameterError("ν_γ boxes need γ != 0")
    low, high = CarlesonBox(Q).height
    value, error = integrate.quad(lambda t: t ** (-1.0 - gamma), low, high, epsabs=0.0, epsrel=tolerance)
    if error > tolerance * max(abs(value), 1e-300) * 10:
        raise AccuracyError(f"quadrature error {error} above tolerance {tolerance} for {Q}")
    return _mass(Q, mu) * value


def carleson_tiling_check(
    level: int,
    cubes: list[DyadicCube],
    gamma: float,
    mu: DyadicMeasure | None = None,
) -> tuple[float, float]:
    """(sum of ν_γ(S(Q)) over the given level cubes, ν_γ of the slab over their union).

    The cubes must be distinct standard-lattice cubes of one level; their boxes
    then tile the slab (union of Q) x (2^level, 2^{level+1}].
    """
    if gamma == 0:
        raise ParameterError("ν_γ boxes need γ != 0")
    if len(set(cubes)) != len(cubes):
        raise ParameterError("tiling check needs distinct cubes")
    if any(q.level != level or q.lattice != 0 for q in cubes):
        raise ParameterError(f"tiling check needs standard-lattice cubes of level {level}")
    boxes = math.fsum(nu_gamma_box(q, gamma, mu) for q in cubes)
    side = math.ldexp(1.0, level)
    slab = math.fsum(_mass(q, mu) for q in cubes) * height_integral(side, 2 * side, gamma)
    return boxes, slab


def _mass(Q: DyadicCube, mu: DyadicMeasure | None) -> float:  # noqa: N803
    if mu is None or mu.is_lebesgue:
        return float(Q.volume)
    return Field(StepFunction.zero(Q.dimension), mu).mass(Q)
