"""One-dimensional Sobolev-side check: ||F||_{O^p} against ||F'||_{L^p} for F = ∫ g."""

from __future__ import annotations

import math

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.errors import ParameterError
from dyadnorm.function.linear import PiecewiseLinear1D
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction
from dyadnorm.halfspace.estimate import sample_halfspace, sample_levels
from dyadnorm.norms.lebesgue import lp_norm
from dyadnorm.norms.weak import profile_norm
from dyadnorm.profile.build import build_linear_osc_profile
from dyadnorm.profile.evaluate import profile_sup
from dyadnorm.profile.models import FULL_WINDOW, LevelWindow
from dyadnorm.verify.report import ClaimReport


def sobolev_side_check_1d(
    g: StepFunction,
    p: float,
    window: LevelWindow = FULL_WINDOW,
    refine: int = 0,
    settings: DyadnormSettings | None = None,
) -> ClaimReport:
    if g.dimension != 1:
        raise ParameterError(f"the derivative must live on the line, got dimension {g.dimension}")
    if not 1 < p < math.inf:
        raise ParameterError(f"need 1 < p < inf, got {p}")
    settings = settings or load_settings()
    F = PiecewiseLinear1D(g)  # noqa: N806
    profile = build_linear_osc_profile(F, 0.0, p, p, window)
    osc = profile_norm(profile, p, "O^p", settings).value
    gradient = lp_norm(g, None, p).value
    ratio = osc / gradient if gradient > 0 else 0.0

    if g.is_zero():
        estimate = 0.0
    else:
        _, sampled = sample_halfspace(
            lambda x, t: F.interval_oscillation(x[0] - t, x[0] + t),
            g,
            DyadicMeasure.lebesgue(1),
            0.0,
            p,
            p,
            sample_levels(g, window),
            refine,
            settings.max_cubes,
        )
        estimate = profile_sup(sampled, p, settings.max_tail_terms, settings.tail_span_bits) ** (1 / p)
    halfspace_ratio = estimate / gradient if gradient > 0 else 0.0
    return ClaimReport(
        claim="sobolev-1d",
        params={"p": p, "window": str(window), "refine": refine},
        series=[
            {"quantity": "osc_norm", "value": osc},
            {"quantity": "gradient_lp", "value": gradient},
            {"quantity": "halfspace_estimate", "value": estimate},
        ],
        measured={"ratio": ratio, "halfspace_ratio": halfspace_ratio},
        checks={
            "ratio_finite": math.isfinite(ratio),
            "ratio_below_pilot": ratio <= settings.pilot_constant,
        },
    )
