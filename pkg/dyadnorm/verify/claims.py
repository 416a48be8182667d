"""Numerical checks of the four counterexample claims on the example constructions.

Every claim that something is infinite is checked either by a divergence
witness from the tail algebra or by growth across at least three truncations.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from fractions import Fraction

from scipy.special import zeta

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.constructions.build import BuiltExample, build_example
from dyadnorm.constructions.nested import NestedCollections
from dyadnorm.constructions.sparse import SparsePlacement, level_set_bound, level_threshold
from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.constructions.towers import spike_interval_integral
from dyadnorm.dyadic.cube import DyadicCube, unit_cube
from dyadnorm.errors import ParameterError
from dyadnorm.function.field import Field
from dyadnorm.function.shape import leaf, split
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.jn import jnp_dyadic
from dyadnorm.norms.lebesgue import lp_norm, region_distribution, weak_lp_norm
from dyadnorm.norms.weak import lattice_norms, op_norm
from dyadnorm.profile.build import build_mean_profile, build_osc_profile
from dyadnorm.verify.report import ClaimReport

CLAIM_IDS: tuple[str, ...] = ("1", "2", "3", "4")

CLAIM_EXAMPLES: dict[str, tuple[str, ...]] = {
    "1": ("E0", "E1", "E2"),
    "2": ("E3",),
    "3": ("E4", "E5"),
    "4": ("E6",),
}

DEFAULT_EXAMPLES: dict[str, dict[str, object]] = {
    "1": {"id": "E1", "truncation": 4},
    "2": {"id": "E3"},
    "3": {"id": "E4"},
    "4": {"id": "E6"},
}

# W counts values strictly above λ; evaluate just below a threshold that is attained
_BELOW = 1 - 1e-9
_REL = 1e-9

ClaimRunner = Callable[[ExampleSpec, Sequence[int] | None, float, DyadnormSettings], ClaimReport]


def verify_claim(
    claim: str | int,
    spec: ExampleSpec | None = None,
    truncations: Sequence[int] | None = None,
    q: float = 2.0,
    settings: DyadnormSettings | None = None,
) -> ClaimReport:
    """Run the checks of one claim on its example, over the given truncations."""
    key = str(claim)
    if key not in CLAIM_IDS:
        raise ParameterError(f"unknown claim {claim!r}; expected one of {', '.join(CLAIM_IDS)}")
    spec = spec or ExampleSpec.model_validate(DEFAULT_EXAMPLES[key])
    if spec.id not in CLAIM_EXAMPLES[key]:
        raise ParameterError(
            f"claim {key} is checked on {', '.join(CLAIM_EXAMPLES[key])}, got {spec.id}"
        )
    if truncations is not None and (not truncations or min(truncations) < 1):
        raise ParameterError(f"truncations must be positive, got {list(truncations)}")
    if not 1 < q < math.inf:
        raise ParameterError(f"q must lie in (1, inf), got {q}")
    return _RUNNERS[spec.id](spec, truncations, q, settings or load_settings())


def with_truncation(spec: ExampleSpec, truncation: int) -> ExampleSpec:
    """The same example at another N, K or M, validated again."""
    return ExampleSpec.model_validate({**spec.model_dump(), "truncation": truncation})


def spike_series(N: int, n: int) -> Fraction:  # noqa: N803
    """λ_n times the number of intervals [0, 2^{-k}) with integral at least λ_n = 1/n^2."""
    lam = Fraction(1, n * n)
    k = 0
    while spike_interval_integral(N, k) >= lam:
        k += 1
    return lam * k


def product_constant(terms: int = 64) -> float:
    """prod over l >= 1 of (1 - 2^{-l})."""
    return math.prod(1 - 2.0**-l for l in range(1, terms + 1))


def survival_sums(eps: Sequence[float]) -> list[float]:
    """Partial sums over j of (1 - ε_1) ... (1 - ε_j)."""
    out, running, total = [], 1.0, 0.0
    for e in eps:
        running *= 1 - e
        total += running
        out.append(total)
    return out


def parent_oscillation(data: NestedCollections, k: int, n: int) -> float:
    """O(f, parent of a C_k cube); the parent holds the C_k cube and the generation-(k-1) fill."""
    fill = math.fsum(data.coefficients[: k - 1])
    shape = split([data.shapes[k - 1]] + [leaf(fill)] * ((1 << n) - 1))
    return Field(StepFunction(n, 0, {(0,) * n: shape})).oscillation(unit_cube(n))


def corner_lambda(n: int, p: float) -> float:
    """Half of the oscillation lower bound (1 - 2^{-n}) 2^{-n} (2^{n/p} - 1) / 2 of the corner tower."""
    return (1 - 2.0**-n) * 2.0**-n * (2.0 ** (n / p) - 1) / 4


# ---- claim 1 --------------------------------------------------------------------------


def _claim1_indicator(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    f = build_example(spec).function
    result = op_norm(f, None, 1.0, 0.0, 0.0, "mean", scope=unit_cube(spec.n), settings=settings)
    return ClaimReport(
        claim="1",
        params=_params(spec),
        series=[{"quantity": "a_norm", "value": result.value, "witness": result.witness}],
        checks={
            "a_norm_infinite": result.is_infinite,
            "divergence_witness": "divergence" in result.details,
        },
        measured={"a_norm": result.value},
    )


def _claim1_spikes(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.truncation is not None
    N = spec.truncation  # noqa: N806
    built = build_example(spec)
    f = built.function
    profile = build_mean_profile(f, None, 1.0, 1.0, 1.0, scope=unit_cube(1))
    rows: list[dict[str, object]] = []
    exact_ok = spine_ok = profile_ok = True
    for n in range(1, N + 1):
        lam = Fraction(1, n * n)
        exact = spike_series(N, n)
        spine = Fraction(n**3 + 1, n * n)
        measured = float(lam) * profile.W(float(lam) * _BELOW)
        rows.append(
            {
                "n": n,
                "lambda": float(lam),
                "exact_series": float(exact),
                "spine_series": float(spine),
                "profile_series": measured,
            }
        )
        exact_ok = exact_ok and exact >= n
        spine_ok = spine_ok and exact >= spine
        profile_ok = profile_ok and measured >= n * (1 - _REL)
    l1 = lp_norm(f, None, 1.0).value
    return ClaimReport(
        claim="1",
        params=_params(spec),
        series=rows,
        checks={
            "exact_series_at_least_n": exact_ok,
            "exact_series_covers_spine": spine_ok,
            "profile_series_at_least_n": profile_ok,
            "last_series_is_spine": spike_series(N, N) == Fraction(N**3 + 1, N * N),
            "l1_bounded": l1 <= math.pi**2 / 6,
            "l1_matches_sum": math.isclose(l1, built.facts["integral"], rel_tol=_REL),
        },
        measured={"l1": l1, "l1_bound": math.pi**2 / 6},
    )


def _claim1_nested(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.truncation is not None and spec.gamma is not None and spec.alpha is not None
    gamma, alpha = spec.gamma, spec.alpha
    levels = list(truncations or (spec.truncation, spec.truncation + 1, spec.truncation + 2))
    const = product_constant()
    l1_bound = float(zeta(1 + alpha))
    rows: list[dict[str, object]] = []
    covers = l1_ok = True
    best: list[float] = []
    l1_values: list[float] = []
    for K in levels:  # noqa: N806
        built = build_example(with_truncation(spec, K))
        data = built.construction
        assert isinstance(data, NestedCollections)
        profile = build_mean_profile(built.function, None, gamma, gamma, 1.0, scope=unit_cube(1))
        sums = survival_sums(data.eps)
        lower_best = 0.0
        for k in range(1, K):
            lam = 0.5 * const * math.fsum((k + i) ** (-1 - alpha) for i in range(1, K - k + 1))
            series = lam * profile.W(lam)
            lower = lam * sums[k - 1]
            rows.append(
                {
                    "K": K,
                    "k": k,
                    "lambda": lam,
                    "series": series,
                    "lower_bound": lower,
                    "k_power": k ** (1 - alpha),
                }
            )
            covers = covers and series >= lower * (1 - _REL)
            lower_best = max(lower_best, lower)
        best.append(lower_best)
        l1 = lp_norm(built.function, None, 1.0).value
        l1_values.append(l1)
        l1_ok = l1_ok and l1 <= l1_bound
    return ClaimReport(
        claim="1",
        params={**_params(spec), "truncations": levels},
        series=rows,
        checks={
            "series_covers_lower_bound": covers,
            "lower_bound_nondecreasing": all(b >= a for a, b in zip(best, best[1:], strict=False)),
            "l1_bounded": l1_ok,
        },
        measured={"l1_max": max(l1_values), "l1_bound": l1_bound, "lower_bound_last": best[-1]},
        notes=[f"the lower bound grows like k^(1-α) = k^{1 - alpha:g}; slow for α near 1"],
    )


# ---- claim 2 --------------------------------------------------------------------------


def _claim2(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.truncation is not None and spec.p is not None and spec.gamma is not None
    p, gamma = spec.p, spec.gamma
    oscillating = spec.variant == "oscillating"
    levels = list(truncations or (spec.truncation, spec.truncation + 2, spec.truncation + 4))
    rows: list[dict[str, object]] = []
    b_values: list[float] = []
    jn_values: list[float] = []
    same_distribution = True
    for T in levels:  # noqa: N806
        built = build_example(with_truncation(spec, T))
        f = built.function
        b = op_norm(f, None, p, gamma, gamma, "osc", settings=settings).value
        weak = weak_lp_norm(f, None, p).value
        row: dict[str, object] = {"T": T, "b_norm": b, "weak_lp": weak}
        if oscillating:
            weak_abs = weak_lp_norm(f.abs(), None, p).value
            same_distribution = same_distribution and math.isclose(weak, weak_abs, rel_tol=1e-12)
            count = built.facts["alternating_count"]
            row["log_count"] = math.log(count) if count > 0 else 0.0
        else:
            jn = jnp_dyadic(f, unit_cube(1), p).value
            jn_values.append(jn)
            row["jn_p"] = jn
        b_values.append(b)
        rows.append(row)
    checks: dict[str, bool]
    if oscillating:
        checks = {
            "same_weak_norm_as_modulus": same_distribution,
            "b_norm_grows": b_values[-1] > b_values[0],
        }
    else:
        finite = all(math.isfinite(b) for b in b_values)
        checks = {
            "b_norm_finite": finite,
            "b_norm_stable": finite and max(b_values) <= 2 * min(b_values),
            "jn_grows": jn_values[-1] > jn_values[0],
        }
    measured = {"b_first": b_values[0], "b_last": b_values[-1]}
    if jn_values:
        measured |= {"jn_first": jn_values[0], "jn_last": jn_values[-1]}
    return ClaimReport(
        claim="2",
        params={**_params(spec), "truncations": levels},
        series=rows,
        checks=checks,
        measured=measured,
    )


# ---- claim 3 --------------------------------------------------------------------------


def _claim3_corner(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.p is not None
    n, p = spec.n, spec.p
    root = unit_cube(n)
    levels = list(truncations or (6, 10, 14))
    checks: dict[str, bool] = {}
    measured: dict[str, float] = {}
    notes: list[str] = []
    limit: float | None = None
    if spec.alpha is None:
        tower = build_example(ExampleSpec(id="E4", n=n, p=p, variant="self_similar")).function
        b_full = op_norm(tower, None, p, n, n, "osc", settings=settings)
        limit = jnp_dyadic(tower, root, p).value
        checks["self_similar_b_norm_infinite"] = b_full.is_infinite
        checks["divergence_witness"] = "divergence" in b_full.details
        measured |= {"jn_self_similar": limit}
    lam = corner_lambda(n, p)
    rows: list[dict[str, object]] = []
    jn_values: list[float] = []
    b_values: list[float] = []
    above = True
    for K in levels:  # noqa: N806
        f = build_example(with_truncation(spec.model_copy(update={"variant": "base"}), K)).function
        field = Field(f)
        smallest = math.inf
        for k in range(1, K):
            cube = DyadicCube(0, -k, (0,) * n)
            smallest = min(smallest, cube.side ** (n / p) * field.oscillation(cube))
        jn = jnp_dyadic(f, root, p).value
        b = op_norm(f, None, p, n, n, "osc", settings=settings).value
        jn_values.append(jn)
        b_values.append(b)
        above = above and (K < 2 or smallest > lam)
        rows.append({"K": K, "jn_p": jn, "b_norm": b, "min_corner_b": smallest})
    checks["jn_bounded"] = max(jn_values) <= settings.pilot_constant
    checks["b_norm_grows"] = b_values[-1] > b_values[0]
    if spec.alpha is None:
        assert limit is not None
        checks["corner_b_above_lambda"] = above
        checks["jn_converges"] = abs(jn_values[-1] - limit) <= 0.05 * limit
        notes.append("jn_converges compares the deepest truncation with the self-similar limit")
    measured |= {"lambda": lam, "jn_max": max(jn_values), "b_last": b_values[-1]}
    return ClaimReport(
        claim="3",
        params={**_params(spec), "truncations": levels},
        series=rows,
        checks=checks,
        measured=measured,
        notes=notes,
    )


def _claim3_nested(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.truncation is not None and spec.p is not None and spec.gamma is not None
    n, p, gamma = spec.n, spec.p, spec.gamma
    root = unit_cube(n)
    levels = list(truncations or (spec.truncation, spec.truncation + 1, spec.truncation + 2))
    rows: list[dict[str, object]] = []
    covers = True
    partials: list[float] = []
    jn_values: list[float] = []
    for K in levels:  # noqa: N806
        built = build_example(with_truncation(spec, K))
        data = built.construction
        assert isinstance(data, NestedCollections)
        parents = [
            2.0 ** (-(depth - 1) * gamma / p) * parent_oscillation(data, k, n)
            for k, depth in enumerate(data.depths, start=1)
        ]
        lam = 0.5 * min(parents)
        profile = build_osc_profile(built.function, None, gamma, gamma, p, scope=root)
        count = profile.W(lam)
        partial = survival_sums(data.eps)[-1]
        jn = jnp_dyadic(built.function, root, p).value
        covers = covers and count >= partial * (1 - _REL)
        partials.append(partial)
        jn_values.append(jn)
        rows.append(
            {
                "K": K,
                "lambda": lam,
                "weight_above": count,
                "partial_sum": partial,
                "scaled": lam**p * count,
                "jn_p": jn,
            }
        )
    return ClaimReport(
        claim="3",
        params={**_params(spec), "truncations": levels},
        series=rows,
        checks={
            "weight_covers_partial_sums": covers,
            "partial_sums_grow": all(b > a for a, b in zip(partials, partials[1:], strict=False)),
            "jn_bounded": max(jn_values) <= settings.pilot_constant,
        },
        measured={"jn_max": max(jn_values), "partial_last": partials[-1]},
    )


# ---- claim 4 --------------------------------------------------------------------------


def _claim4(
    spec: ExampleSpec, truncations: Sequence[int] | None, q: float, settings: DyadnormSettings
) -> ClaimReport:
    assert spec.p is not None and spec.gamma is not None
    p, gamma = spec.p, spec.gamma
    tilde = spec.variant == "tilde"
    levels = list(truncations or (4, 8, 12))
    rows: list[dict[str, object]] = []
    b_values: list[float] = []
    a_values: list[float] = []
    scaled_sets: list[float] = []
    covers = True
    for M in levels:  # noqa: N806
        s = with_truncation(spec, M)
        built: BuiltExample = build_example(s)
        f = built.function
        placement = built.construction
        assert isinstance(placement, SparsePlacement)
        if tilde:
            b = max(r.value for r in lattice_norms(f, None, p, gamma, gamma, "osc", settings=settings))
        else:
            b = op_norm(f, None, p, gamma, gamma, "osc", settings=settings).value
        lam = level_threshold(s)
        dist, volume = region_distribution(f)
        level_set = dist.mass_above(lam) * volume
        bound = level_set_bound(placement, lam) * (0.5 if tilde else 1.0)
        covers = covers and level_set >= bound * (1 - _REL)
        scaled = lam**q * level_set
        a = float(built.facts["a_quantity"])
        row: dict[str, object] = {
            "M": M,
            "b_norm": b,
            "A": a,
            "lambda": lam,
            "level_set": level_set,
            "level_set_bound": bound,
            "scaled_level_set": scaled,
            "weak_lq": weak_lp_norm(f, None, q).value,
        }
        if tilde:
            row["sup_error"] = placement.sup_error
            row["slope"] = placement.slope
        rows.append(row)
        b_values.append(b)
        a_values.append(a)
        scaled_sets.append(scaled)
    growth = all(
        b >= a * 1.5 ** math.log2(m2 / m1)
        for a, b, m1, m2 in zip(scaled_sets, scaled_sets[1:], levels, levels[1:], strict=False)
    )
    finite = all(math.isfinite(b) for b in b_values)
    return ClaimReport(
        claim="4",
        params={**_params(spec), "q": q, "truncations": levels},
        series=rows,
        checks={
            "b_norm_bounded": finite and max(b_values) <= 2 * min(b_values),
            "a_quantity_bounded": max(a_values) <= 2 * min(a_values),
            "level_set_covers_intervals": covers,
            "level_set_grows": growth,
        },
        measured={
            "b_ratio": max(b_values) / min(b_values) if min(b_values) > 0 else math.inf,
            "growth_last": scaled_sets[-1] / scaled_sets[0] if scaled_sets[0] > 0 else math.inf,
        },
    )


def _params(spec: ExampleSpec) -> dict[str, object]:
    return spec.model_dump(exclude_none=True)


_RUNNERS: dict[str, ClaimRunner] = {
    "E0": _claim1_indicator,
    "E1": _claim1_spikes,
    "E2": _claim1_nested,
    "E3": _claim2,
    "E4": _claim3_corner,
    "E5": _claim3_nested,
    "E6": _claim4,
}
