"""Dispatch from an ExampleSpec to its construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from dyadnorm.constructions.nested import NestedCollections, count_generation, nested_example
from dyadnorm.constructions.power import alternating_count, power_example
from dyadnorm.constructions.sparse import SparsePlacement, a_quantity, sparse_example
from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.constructions.towers import (
    corner_example,
    corner_integral,
    indicator_example,
    spike_example,
)
from dyadnorm.errors import VerificationError
from dyadnorm.function.shape import distinct_nodes
from dyadnorm.function.step import StepFunction


@dataclass(frozen=True)
class BuiltExample:
    spec: ExampleSpec
    function: StepFunction
    facts: dict[str, Any] = field(default_factory=dict)
    construction: NestedCollections | SparsePlacement | None = None


def build_example(spec: ExampleSpec) -> BuiltExample:
    """The function of ``spec`` with the exact construction data checked on the way."""
    facts: dict[str, Any] = {"label": spec.label}
    construction: NestedCollections | SparsePlacement | None = None
    if spec.id == "E0":
        f = indicator_example(spec)
    elif spec.id == "E1":
        f = spike_example(spec)
        assert spec.truncation is not None
        facts["integral"] = math.fsum(1 / m**2 for m in range(1, spec.truncation + 1))
    elif spec.id in ("E2", "E5"):
        f, data = nested_example(spec)
        _check_counts(data, f, spec.n)
        facts.update(
            n_sequence=list(data.n_seq),
            q=list(data.q),
            eps=list(data.eps),
            coefficients=list(data.coefficients),
            depths=list(data.depths),
        )
        construction = data
    elif spec.id == "E3":
        f = power_example(spec)
        assert spec.p is not None
        facts["integral"] = spec.p / (spec.p - 1)
        if spec.variant == "oscillating":
            facts["alternating_count"] = alternating_count(spec)
    elif spec.id == "E4":
        f = corner_example(spec)
        if spec.variant != "self_similar":
            facts["integral"] = corner_integral(spec)
    else:
        f, placement = sparse_example(spec)
        assert spec.p is not None and spec.gamma is not None
        facts.update(
            intervals=placement.interval_count,
            groups=[(g.k, g.count, g.level, g.value) for g in placement.groups],
            region_level=placement.region_level,
            a_quantity=a_quantity(placement, spec.p, spec.gamma),
            certified=True,
        )
        if placement.bumps:
            facts["sup_error"] = placement.sup_error
            facts["slope"] = placement.slope
        construction = placement
    facts["nodes"] = f.node_count
    facts["distinct_nodes"] = sum(distinct_nodes(s) for s in f.cells.values())
    return BuiltExample(spec, f, facts, construction)


def make_example(spec: ExampleSpec) -> StepFunction:
    return build_example(spec).function


def _check_counts(data: NestedCollections, f: StepFunction, n: int) -> None:
    """#C_k = q_1 ... q_k with every C_k cube s_k levels below [0, 1)^n."""
    root = f.cells[(0,) * n]
    expected = 1
    for k, (shape, q, depth) in enumerate(zip(data.shapes, data.q, data.depths, strict=True), start=1):
        expected *= q
        found = count_generation(root, shape, depth)
        if found != expected:
            raise VerificationError(
                f"generation {k} has {found} cubes, expected {expected}",
                {"generation": k, "found": found, "expected": expected},
            )
