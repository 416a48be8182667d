"""The power singularity x^{-1/p} on [0, 1) and its sign-alternating rearrangement (E3).

The function is resolved on the dyadic annuli [2^{-i-1}, 2^{-i}), i < T, each
cut into 2^depth equal pieces carrying the exact mean of x^{-1/p}; the core
[0, 2^{-T}) carries its own mean. Integrals of the staircase over every cube
coarser than its cells are therefore exact.
"""

from __future__ import annotations

import math

from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.function.step import StepFunction


def power_primitive(x: float, p: float) -> float:
    """∫_0^x t^{-1/p} dt."""
    e = 1.0 - 1.0 / p
    return x**e / e


def power_mean(lo: float, hi: float, p: float) -> float:
    return (power_primitive(hi, p) - power_primitive(lo, p)) / (hi - lo)


def power_pieces(spec: ExampleSpec) -> list[tuple[DyadicCube, float]]:
    """(cell, mean of x^{-1/p}) for every cell of the staircase, left to right."""
    assert spec.p is not None and spec.truncation is not None
    p, annuli = spec.p, spec.truncation
    oscillating = spec.variant == "oscillating"
    core = DyadicCube(0, -annuli, (0,))
    pieces = [(core, power_mean(0.0, math.ldexp(1.0, -annuli), p))]
    for i in range(annuli - 1, -1, -1):
        # sign intervals have length 2^{-T}, so the annulus cells must be at least that fine
        m = max(spec.depth, annuli - i - 1) if oscillating else spec.depth
        level = -(i + 1 + m)
        width = math.ldexp(1.0, level)
        for j in range(1 << m, 1 << (m + 1)):
            pieces.append((DyadicCube(0, level, (j,)), power_mean(j * width, (j + 1) * width, p)))
    if oscillating:
        pieces = [(cube, value * _sign(cube, annuli)) for cube, value in pieces]
    return pieces


def power_example(spec: ExampleSpec) -> StepFunction:
    """x^{-1/p} χ_[0,1) as a staircase of exact means; f_k with k = T for the oscillating variant."""
    return StepFunction.from_leaves(power_pieces(spec), frame_level=0)


def alternating_count(spec: ExampleSpec) -> float:
    """N_k of the rearrangement lower bound: 2^{k-2} for γ < 0, 2^{|γ-1|(k-2)} for γ > 0."""
    assert spec.gamma is not None and spec.truncation is not None
    k = spec.truncation
    if spec.gamma < 0:
        return 2.0 ** (k - 2)
    return 2.0 ** (abs(spec.gamma - 1) * (k - 2))


def _sign(cube: DyadicCube, k: int) -> float:
    """(-1)^m on [m 2^{-k}, (m+1) 2^{-k})."""
    m = cube.index[0] >> (-k - cube.level) if cube.level <= -k else 0
    return -1.0 if m & 1 else 1.0
