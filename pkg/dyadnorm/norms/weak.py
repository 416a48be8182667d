"""Dyadic weak-type quasi-norms: the sup of λ^p W(λ) and the [a(f)] envelopes."""

from __future__ import annotations

import math

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.dyadic.family import ShiftedLatticeFamily
from dyadnorm.errors import ParameterError
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.results import NormResult
from dyadnorm.profile.build import build_profile
from dyadnorm.profile.evaluate import profile_envelopes, profile_sup, sup_location
from dyadnorm.profile.models import FULL_WINDOW, Kind, LambdaProfile, LevelWindow


def profile_norm(
    profile: LambdaProfile,
    p: float,
    norm: str = "O^p",
    settings: DyadnormSettings | None = None,
    details: dict[str, object] | None = None,
) -> NormResult:
    """(sup λ^p W(λ))^{1/p} of a built profile, with its witness."""
    settings = settings or load_settings()
    sup = profile_sup(profile, p, settings.max_tail_terms, settings.tail_span_bits)
    value = sup ** (1.0 / p) if math.isfinite(sup) else math.inf
    witness: list[str] = []
    info: dict[str, object] = dict(details or {})
    info["window"] = str(profile.window)
    info["families"] = len(profile.families)
    if profile.divergence is not None:
        witness.extend(profile.divergence.cubes)
        info["divergence"] = profile.divergence.reason
        info["lower_value"] = profile.divergence.lower_value
    elif value > 0:
        lam = sup_location(profile, p, settings.max_tail_terms)
        if lam is not None:
            witness.append(f"lambda={lam!r}")
    if profile.notes:
        info["notes"] = list(profile.notes)
    return NormResult(
        norm=norm,
        value=value,
        exactness="exact" if profile.complete else "truncated",
        witness=witness,
        details=info,
    )


def op_norm(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    gamma1: float = 0.0,
    gamma2: float | None = None,
    kind: Kind = "osc",
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
    lattice: int = 0,
    settings: DyadnormSettings | None = None,
) -> NormResult:
    """||f||_{O^p_{γ1,γ2}} on one lattice; γ2 defaults to p (the space O^p when γ1 = 0)."""
    settings = settings or load_settings()
    gamma2 = p if gamma2 is None else gamma2
    profile = build_profile(
        f, mu, kind, gamma1, gamma2, p, window, scope, lattice, max_configs=settings.max_cubes
    )
    details: dict[str, object] = {
        "p": p,
        "gamma1": gamma1,
        "gamma2": gamma2,
        "kind": kind,
        "lattice": lattice,
    }
    if scope is not None:
        details["scope"] = format_cube(scope)
    return profile_norm(profile, p, f"O^p[{kind}]", settings, details)


def lattice_norms(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    gamma1: float = 0.0,
    gamma2: float | None = None,
    kind: Kind = "osc",
    window: LevelWindow = FULL_WINDOW,
    family: ShiftedLatticeFamily | None = None,
    settings: DyadnormSettings | None = None,
) -> list[NormResult]:
    """op_norm on every member of the shifted-lattice family, in lattice order."""
    family = family or ShiftedLatticeFamily(f.dimension)
    return [
        op_norm(f, mu, p, gamma1, gamma2, kind, window, None, lattice, settings)
        for lattice in family.lattices
    ]


def envelope_norm(
    f: StepFunction,
    mu: DyadicMeasure | None = None,
    p: float = 1.0,
    gamma: float = 1.0,
    window: LevelWindow = FULL_WINDOW,
    scope: DyadicCube | None = None,
    settings: DyadnormSettings | None = None,
) -> NormResult:
    """[a(f)]: liminf as λ -> 0+ of λ^p W(λ) for γ > 0, limsup as λ -> inf for γ < 0, to the 1/p."""
    if gamma == 0:
        raise ParameterError("the envelope norm needs γ != 0")
    settings = settings or load_settings()
    profile = build_profile(
        f, mu, "mean", gamma, gamma, p, window, scope, max_configs=settings.max_cubes
    )
    env = profile_envelopes(profile, p, settings.max_tail_terms, settings.tail_span_bits)
    if gamma > 0:
        raw, upper, side = env.liminf_zero, env.liminf_upper, "liminf_zero"
    else:
        raw, upper, side = env.limsup_infinity, env.limsup_upper, "limsup_infinity"
    details: dict[str, object] = {"p": p, "gamma": gamma, "side": side, "window": str(window)}
    if env.truncated:
        details["upper"] = _root(upper, p)
    if scope is not None:
        details["scope"] = format_cube(scope)
    witness = list(profile.divergence.cubes) if profile.divergence is not None else []
    return NormResult(
        norm="[a(f)]",
        value=_root(raw, p),
        exactness="truncated" if env.truncated else "exact",
        witness=witness,
        details=details,
    )


def _root(x: float, p: float) -> float:
    return x ** (1.0 / p) if math.isfinite(x) else math.inf
