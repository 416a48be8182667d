"""Exact suprema and envelopes of λ^p W(λ) over step-plus-geometric profiles."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np

from dyadnorm.dyadic.cube import DyadicCube
from dyadnorm.errors import ParameterError
from dyadnorm.profile.models import LambdaProfile, TailFamily

_CRITICAL_TOL = 1e-9

Regime = Literal["bounded", "critical_zero", "critical_infinity", "divergent_zero", "divergent_infinity", "divergent"]


@dataclass(frozen=True)
class FamilyRegime:
    """Asymptotic behaviour of λ^p W_family(λ)."""

    regime: Regime
    sup_limit: float = 0.0
    liminf_zero: float = 0.0
    limsup_infinity: float = 0.0


@dataclass(frozen=True)
class Breakpoints:
    """Distinct values v (descending) with S = W(v-) = total weight of entries >= v."""

    values: np.ndarray
    cumulative: np.ndarray
    tail_mask: np.ndarray


@dataclass(frozen=True)
class Envelopes:
    liminf_zero: float
    limsup_infinity: float
    truncated: bool = False
    liminf_upper: float = 0.0
    limsup_upper: float = 0.0


@dataclass(frozen=True)
class ProfileRow:
    lam: float
    W: float  # noqa: N815
    lam_p_W: float  # noqa: N815
    source: Literal["step", "tail"]


def classify_family(family: TailFamily, p: float) -> FamilyRegime:
    if family.is_finite:
        return FamilyRegime("bounded")
    c_star, rho_star = family.dominant
    if c_star == 0:
        return FamilyRegime("bounded")
    rho_v = family.value_ratio
    a0p = family.a0**p
    if _close(rho_v, 1.0):
        return FamilyRegime("divergent" if rho_star >= 1 - _CRITICAL_TOL else "bounded")
    product = rho_v**p * rho_star
    if rho_v < 1:
        if rho_star <= 1 + _CRITICAL_TOL:
            return FamilyRegime("bounded")
        if _close(product, 1.0):
            return FamilyRegime(
                "critical_zero",
                sup_limit=a0p * c_star * rho_star / (rho_star - 1),
                liminf_zero=a0p * c_star / (rho_star - 1),
            )
        return FamilyRegime("divergent_zero" if product > 1 else "bounded")
    if rho_star >= 1 - _CRITICAL_TOL:
        return FamilyRegime("divergent")
    if _close(product, 1.0):
        limit = a0p * c_star / (1 - rho_star)
        return FamilyRegime("critical_infinity", sup_limit=limit, limsup_infinity=limit)
    return FamilyRegime("divergent_infinity" if product > 1 else "bounded")


def breakpoints(profile: LambdaProfile, max_terms: int = 512, span_bits: int = 64) -> Breakpoints:
    """Finite steps plus every tail family expanded over the reference value span."""
    chunks_v = [profile.values]
    chunks_w = [profile.weights]
    chunks_t = [np.zeros(profile.values.size, dtype=bool)]
    scale = [float(v) for v in profile.values[[0, -1]]] if profile.values.size else []
    scale.extend(f.a0 for f in profile.families)
    if scale:
        lo_cut = min(scale) * 2.0**-span_bits
        hi_cut = max(scale) * 2.0**span_bits
        for family in profile.families:
            values, weights = _expand(family, lo_cut, hi_cut, max_terms)
            chunks_v.append(values)
            chunks_w.append(weights)
            chunks_t.append(np.ones(values.size, dtype=bool))
    values = np.concatenate(chunks_v)
    weights = np.concatenate(chunks_w)
    tails = np.concatenate(chunks_t)
    if not values.size:
        return Breakpoints(values, values.copy(), tails)
    order = np.argsort(-values, kind="stable")
    values, weights, tails = values[order], weights[order], tails[order]
    unique, start = np.unique(-values, return_index=True)
    summed = np.add.reduceat(weights, start)
    tail_mask = np.logical_or.reduceat(tails, start)
    return Breakpoints(-unique, np.cumsum(summed), tail_mask)


def profile_sup(profile: LambdaProfile, p: float, max_terms: int = 512, span_bits: int = 64) -> float:
    """sup over λ > 0 of λ^p W(λ); +inf on divergence."""
    _check_p(p)
    if profile.divergence is not None:
        return math.inf
    best = 0.0
    for family in profile.families:
        regime = classify_family(family, p)
        if regime.regime.startswith("divergent"):
            return math.inf
        best = max(best, regime.sup_limit)
    points = breakpoints(profile, max_terms, span_bits)
    if points.values.size:
        best = max(best, float(np.max(points.values**p * points.cumulative)))
    return best


def sup_location(profile: LambdaProfile, p: float, max_terms: int = 512) -> float | None:
    """Breakpoint value at which the enumerated supremum is reached."""
    points = breakpoints(profile, max_terms)
    if not points.values.size:
        return None
    return float(points.values[int(np.argmax(points.values**p * points.cumulative))])


def profile_envelopes(
    profile: LambdaProfile, p: float, max_terms: int = 512, span_bits: int = 64
) -> Envelopes:
    """(liminf as λ -> 0+, limsup as λ -> inf) of λ^p W(λ)."""
    _check_p(p)
    if profile.divergence is not None:
        return Envelopes(math.inf, math.inf, not profile.complete, math.inf, math.inf)
    regimes = [classify_family(f, p) for f in profile.families]
    names = [r.regime for r in regimes]
    if "divergent" in names:
        return Envelopes(math.inf, math.inf, not profile.complete, math.inf, math.inf)
    points = breakpoints(profile, max_terms, span_bits)
    zero_side = [r for r in regimes if r.regime in ("critical_zero", "divergent_zero")]
    inf_side = [r for r in regimes if r.regime in ("critical_infinity", "divergent_infinity")]
    if any(r.regime == "divergent_zero" for r in zero_side):
        liminf = math.inf
    elif len(zero_side) == 1:
        liminf = zero_side[0].liminf_zero
    elif zero_side:
        liminf = _edge_estimate(points, p, span_bits, low=True)
    else:
        liminf = 0.0
    if any(r.regime == "divergent_infinity" for r in inf_side):
        limsup = math.inf
    elif len(inf_side) == 1:
        limsup = inf_side[0].limsup_infinity
    elif inf_side:
        limsup = _edge_estimate(points, p, span_bits, low=False)
    else:
        limsup = 0.0
    if profile.complete:
        return Envelopes(liminf, limsup, False, liminf, limsup)
    upper = profile_sup(profile, p, max_terms, span_bits)
    return Envelopes(liminf, limsup, True, max(upper, liminf), max(upper, limsup))


def profile_rows(profile: LambdaProfile, p: float, max_terms: int = 512) -> list[ProfileRow]:
    """(λ, W(λ-), λ^p W(λ-), source) at every breakpoint, largest λ first."""
    _check_p(p)
    points = breakpoints(profile, max_terms)
    return [
        ProfileRow(float(v), float(s), float(v**p * s), "tail" if t else "step")
        for v, s, t in zip(points.values, points.cumulative, points.tail_mask, strict=True)
    ]


def disjoint_level_sup(
    cubes: Mapping[DyadicCube, tuple[float, float]], lam: float
) -> tuple[float, list[DyadicCube]]:
    """Max total weight over antichains of cubes with |value| > lam.

    ``cubes`` maps each cube to (value, weight). Returns the optimum and a witness.
    """
    if lam < 0:
        raise ParameterError(f"λ must be nonnegative, got {lam}")
    if not cubes:
        return 0.0, []
    lattices = {q.lattice for q in cubes}
    if len(lattices) != 1:
        raise ParameterError(f"cubes from several lattices: {sorted(lattices)}")
    top = max(q.level for q in cubes)
    parent_of: dict[DyadicCube, DyadicCube | None] = {}
    for q in cubes:
        parent_of[q] = None
        current = q
        for _ in range(top - q.level):
            current = current.parent()
            if current in cubes:
                parent_of[q] = current
                break
    best: dict[DyadicCube, float] = {}
    picks: dict[DyadicCube, list[DyadicCube]] = {}
    child_sum: dict[DyadicCube, float] = {}
    child_picks: dict[DyadicCube, list[DyadicCube]] = {}
    for q in sorted(cubes, key=lambda c: (c.level, c.index)):
        value, weight = cubes[q]
        own = weight if abs(value) > lam else 0.0
        below = child_sum.get(q, 0.0)
        # ties go to the larger cube
        if own > 0 and own >= below:
            best[q], picks[q] = own, [q]
        else:
            best[q], picks[q] = below, child_picks.get(q, [])
        parent = parent_of[q]
        if parent is not None:
            child_sum[parent] = child_sum.get(parent, 0.0) + best[q]
            child_picks.setdefault(parent, []).extend(picks[q])
    roots = [q for q in cubes if parent_of[q] is None]
    total = sum(best[q] for q in roots)
    witness = sorted((c for q in roots for c in picks[q]), key=lambda c: (-c.level, c.index))
    return total, witness


def _expand(
    family: TailFamily, lo_cut: float, hi_cut: float, max_terms: int
) -> tuple[np.ndarray, np.ndarray]:
    values: list[float] = []
    weights: list[float] = []
    if family.is_finite:
        limit = family.steps or 0
        for r in range(limit):
            values.append(family.value(r))
            weights.append(family.weight(r))
        return np.asarray(values), np.asarray(weights)
    rho = family.value_ratio
    if _close(rho, 1.0):
        total = family.weight_sum(0, None)
        return np.asarray([family.a0]), np.asarray([total])
    r = 0
    while r < max_terms:
        v = family.value(r)
        if (rho < 1 and v < lo_cut) or (rho > 1 and v > hi_cut):
            break
        values.append(v)
        weights.append(family.weight(r))
        r += 1
    if rho > 1:
        rest = family.weight_sum(r, None)
        if math.isfinite(rest) and rest > 0:
            values.append(family.value(r))
            weights.append(rest)
    pairs = [(v, w) for v, w in zip(values, weights, strict=True) if w > 0 and v > 0]
    return np.asarray([v for v, _ in pairs]), np.asarray([w for _, w in pairs])


def _edge_estimate(points: Breakpoints, p: float, span_bits: int, low: bool) -> float:
    """Envelope of λ^p W(λ) from breakpoints in the outer quarter of the expanded range."""
    v, s = points.values, points.cumulative
    if v.size < 2:
        return 0.0
    log_v = np.log2(v)
    quarter = (log_v[0] - log_v[-1]) / 4
    if low:
        mask = log_v[1:] <= log_v[-1] + quarter
        right_limits = v[1:] ** p * s[:-1]
        return float(right_limits[mask].min()) if mask.any() else 0.0
    mask = log_v >= log_v[0] - quarter
    return float((v**p * s)[mask].max())


def _close(x: float, target: float) -> bool:
    return abs(x - target) <= _CRITICAL_TOL * max(abs(target), 1.0)


def _check_p(p: float) -> None:
    if not p >= 1:
        raise ParameterError(f"p must be at least 1, got {p}")
