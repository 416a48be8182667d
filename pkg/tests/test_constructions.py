"""Tests for the example constructions and their parameter validation."""

from __future__ import annotations

from fractions import Fraction

import pytest
from pydantic import ValidationError

from dyadnorm.constructions.build import build_example, make_example
from dyadnorm.constructions.power import power_mean
from dyadnorm.constructions.sparse import sparse_groups
from dyadnorm.constructions.spec import ExampleSpec
from dyadnorm.constructions.towers import spike_interval_integral
from dyadnorm.norms.lebesgue import lp_norm


class TestExampleSpec:
    def test_defaults(self) -> None:
        spec = ExampleSpec(id="E4")
        assert spec.gamma == 1.0
        assert spec.p == 2.0
        assert spec.label == "E4 n=1 p=2 gamma=1 T=8"
        assert ExampleSpec(id="E2").alpha == 0.5

    def test_smallest_sequences(self) -> None:
        assert ExampleSpec(id="E2").n_sequence() == [2, 4, 6, 8]
        assert ExampleSpec(id="E5").n_sequence() == [3, 4, 6]

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"id": "E0", "gamma": 1.0}, "γ = 0"),
            ({"id": "E1", "truncation": 7}, "at most 6"),
            ({"id": "E2", "gamma": 1.5}, "0 < γ < 1"),
            ({"id": "E3", "gamma": 1.0}, "γ != 1"),
            ({"id": "E4", "gamma": 0.5}, "γ = n"),
            ({"id": "E4", "variant": "tilde"}, "no tilde variant"),
            ({"id": "E4", "variant": "self_similar", "alpha": 0.5}, "self-similar"),
            ({"id": "E5", "sequence": [3, 3, 6]}, "increase"),
            ({"id": "E6", "p": 1.0}, "p > 1"),
            ({"id": "E0", "truncation": 0}, "positive"),
        ],
    )
    def test_rejects(self, kwargs: dict[str, object], message: str) -> None:
        with pytest.raises(ValidationError, match=message):
            ExampleSpec(**kwargs)  # type: ignore[arg-type]


class TestBuild:
    def test_indicator(self) -> None:
        f = make_example(ExampleSpec(id="E0"))
        assert f.value_at((0.5,)) == 1.0
        assert f.value_at((1.5,)) == 0.0

    def test_spikes(self) -> None:
        built = build_example(ExampleSpec(id="E1", truncation=2))
        assert built.facts["integral"] == pytest.approx(1.25)
        assert lp_norm(built.function, None, 1.0).value == pytest.approx(1.25)
        assert spike_interval_integral(2, 8) == Fraction(1, 128) + Fraction(1, 4)

    def test_nested_collections(self) -> None:
        built = build_example(ExampleSpec(id="E2"))
        assert built.facts["q"] == [2, 4, 8, 16]
        assert built.facts["depths"] == [2, 6, 12, 20]

    def test_nested_with_distinct_parents(self) -> None:
        built = build_example(ExampleSpec(id="E5"))
        assert built.facts["n_sequence"] == [3, 4, 6]
        assert built.facts["q"] == [2, 4, 8]

    def test_power_staircase_integral(self) -> None:
        built = build_example(ExampleSpec(id="E3", truncation=4, depth=2))
        assert built.facts["integral"] == pytest.approx(2.0)
        assert lp_norm(built.function, None, 1.0).value == pytest.approx(2.0)
        assert power_mean(0.25, 1.0, 2.0) == pytest.approx(4 / 3)

    def test_oscillating_power(self) -> None:
        built = build_example(ExampleSpec(id="E3", truncation=4, depth=1, gamma=0.5, variant="oscillating"))
        assert built.function.min_value() < 0
        assert built.facts["alternating_count"] == pytest.approx(2.0)

    def test_corner_tower(self) -> None:
        built = build_example(ExampleSpec(id="E4", truncation=3))
        expected = sum(2.0 ** (-k / 2) for k in range(1, 4))
        assert built.facts["integral"] == pytest.approx(expected)
        assert lp_norm(built.function, None, 1.0).value == pytest.approx(expected)

    def test_self_similar_tower(self) -> None:
        built = build_example(ExampleSpec(id="E4", variant="self_similar"))
        assert built.function.tail is not None
        assert "integral" not in built.facts

    def test_sparse_groups(self) -> None:
        spec = ExampleSpec(id="E6", truncation=2)
        assert sparse_groups(spec) == [(1, 16, 4, 1.0), (2, 64, 8, 2.0)]
        built = build_example(spec)
        assert built.facts["intervals"] == 80
        assert built.facts["certified"]
