"""Towers of nested corner cubes: E0, E1 and E4."""

from __future__ import annotations

from fractions import Fraction

from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.function.shape import MARKER, ZERO, leaf, split
from dyadnorm.function.step import SelfSimilarTail, StepFunction


def indicator_example(spec: ExampleSpec) -> StepFunction:
    """χ_J with J = [0, 1)^n."""
    return StepFunction.indicator(DyadicCube(0, 0, (0,) * spec.n))


def spike_example(spec: ExampleSpec) -> StepFunction:
    """sum over m <= N of 2^{m^3}/m^2 χ_[0, 2^{-m^3})."""
    assert spec.truncation is not None
    return StepFunction.from_cube_weights(
        [(DyadicCube(0, -(m**3), (0,)), 2.0 ** (m**3) / m**2) for m in range(1, spec.truncation + 1)],
        frame_level=0,
    )


def spike_interval_integral(N: int, k: int) -> Fraction:  # noqa: N803
    """Exact integral of the N-term spike sum over [0, 2^{-k})."""
    total = Fraction(0)
    for m in range(1, N + 1):
        total += Fraction(1, m * m) * min(Fraction(1), Fraction(2) ** (m**3 - k))
    return total


def corner_coefficients(spec: ExampleSpec) -> list[float]:
    """c_k = 2^{kn/p}, times k^{-α/p} for the modified tower."""
    assert spec.p is not None and spec.truncation is not None
    out = []
    for k in range(1, spec.truncation + 1):
        c = 2.0 ** (k * spec.n / spec.p)
        if spec.alpha is not None:
            c *= k ** (-spec.alpha / spec.p)
        out.append(c)
    return out


def corner_example(spec: ExampleSpec) -> StepFunction:
    """sum of c_k χ_{[0, 2^{-k})^n}; the self-similar variant is the whole infinite sum."""
    assert spec.p is not None
    n = spec.n
    if spec.variant == "self_similar":
        c1 = 2.0 ** (n / spec.p)
        anchor = DyadicCube(0, -1, (0,) * n)
        anchor_shape = split([MARKER] + [leaf(c1)] * ((1 << n) - 1))
        root = split([anchor_shape] + [ZERO] * ((1 << n) - 1))
        tail = SelfSimilarTail(anchor=anchor, corner=0, offset=c1, scale=c1)
        return StepFunction(n, 0, {(0,) * n: root}, 0.0, tail)
    weights = [
        (DyadicCube(0, -k, (0,) * n), c) for k, c in enumerate(corner_coefficients(spec), start=1)
    ]
    return StepFunction.from_cube_weights(weights, frame_level=0)


def corner_integral(spec: ExampleSpec) -> float:
    """sum over k <= K of c_k 2^{-kn}."""
    return sum(c * 2.0 ** (-k * spec.n) for k, c in enumerate(corner_coefficients(spec), start=1))
