"""Validated parameters of the example constructions E0-E6."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, model_validator

ExampleId = Literal["E0", "E1", "E2", "E3", "E4", "E5", "E6"]
Variant = Literal["base", "oscillating", "self_similar", "tilde"]

EXAMPLE_IDS: tuple[str, ...] = ("E0", "E1", "E2", "E3", "E4", "E5", "E6")

# the spine of the N-th spike is N^3 levels deep and every tree walk recurses along it
MAX_E1_TERMS = 6

_DEFAULTS: dict[str, dict[str, float | int]] = {
    "E0": {"p": 1.0, "gamma": 0.0, "truncation": 1},
    "E1": {"p": 1.0, "gamma": 1.0, "truncation": 4},
    "E2": {"p": 1.0, "gamma": 0.5, "truncation": 4},
    "E3": {"p": 2.0, "gamma": 0.5, "truncation": 8},
    "E4": {"p": 2.0, "truncation": 8},
    "E5": {"p": 2.0, "truncation": 3},
    "E6": {"p": 2.0, "gamma": 0.5, "truncation": 4},
}


class ExampleSpec(BaseModel):
    """One example: id, exponents, truncation (N, K or M) and placement knobs.

    ``alpha`` switches E4/E5 to the k^{-α/p} modification and sets the decay
    of E2. ``depth`` is the resolution of E3 and of the E6 staircase bumps.
    """

    id: ExampleId
    n: int = 1
    p: float | None = None
    gamma: float | None = None
    alpha: float | None = None
    truncation: int | None = None
    sequence: list[int] | None = None
    separation: int = 8
    depth: int = 6
    variant: Variant = "base"
    shuffle: bool = False
    seed: int = 0

    @model_validator(mode="after")
    def check_domain(self) -> ExampleSpec:
        defaults = _DEFAULTS[self.id]
        if self.p is None:
            self.p = float(defaults["p"])
        if self.gamma is None:
            self.gamma = float(defaults.get("gamma", self.n if self.id == "E4" else self.n / 2))
        if self.truncation is None:
            self.truncation = int(defaults["truncation"])
        if self.n < 1:
            raise ValueError(f"dimension must be positive, got {self.n}")
        if self.truncation < 1:
            raise ValueError(f"truncation must be positive, got {self.truncation}")
        if self.depth < 0:
            raise ValueError(f"depth must be nonnegative, got {self.depth}")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise ValueError(f"α must lie in (0, 1), got {self.alpha}")
        _CHECKS[self.id](self)
        if self.variant != "base" and self.variant not in _VARIANTS[self.id]:
            raise ValueError(f"{self.id} has no {self.variant} variant")
        return self

    @property
    def label(self) -> str:
        parts = [self.id, f"n={self.n}", f"p={self.p:g}", f"gamma={self.gamma:g}", f"T={self.truncation}"]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.variant != "base":
            parts.append(self.variant)
        return " ".join(parts)

    def n_sequence(self) -> list[int]:
        """n_1, ..., n_K for E2 and E5: the given one or the smallest admissible increasing one."""
        if self.sequence is not None:
            return list(self.sequence[: self.truncation])
        assert self.gamma is not None
        rate = 1 - self.gamma if self.id == "E2" else self.n - self.gamma
        out: list[int] = []
        previous = math.floor(self.n / self.gamma) if self.id == "E5" else 0
        for k in range(1, self.truncation + 1):
            m = max(previous + 1, math.ceil(k / rate))
            while not _eps_ok(m * rate, k):
                m += 1
            out.append(m)
            previous = m
        return out


def sequence_numbers(rate: float, n_seq: list[int]) -> tuple[list[int], list[float]]:
    """q_k = floor(2^{n_k rate}) and ε_k = 1 - q_k / 2^{n_k rate}."""
    qs = [math.floor(2.0 ** (m * rate)) for m in n_seq]
    eps = [1 - q / 2.0 ** (m * rate) for q, m in zip(qs, n_seq, strict=True)]
    return qs, eps


def _eps_ok(x: float, k: int) -> bool:
    return x >= k and 1 - math.floor(2.0**x) / 2.0**x <= 2.0**-k


def _check_e0(s: ExampleSpec) -> None:
    if s.gamma != 0:
        raise ValueError(f"E0 is the γ = 0 example, got γ={s.gamma}")


def _check_e1(s: ExampleSpec) -> None:
    if s.n != 1 or s.p != 1 or s.gamma != 1:
        raise ValueError("E1 lives on the line with γ = p = 1")
    if s.truncation is not None and s.truncation > MAX_E1_TERMS:
        raise ValueError(f"E1 supports at most {MAX_E1_TERMS} terms, got {s.truncation}")


def _check_e2(s: ExampleSpec) -> None:
    assert s.gamma is not None
    if s.n != 1 or s.p != 1:
        raise ValueError("E2 lives on the line with p = 1")
    if not 0 < s.gamma < 1:
        raise ValueError(f"E2 needs 0 < γ < 1, got {s.gamma}")
    if s.alpha is None:
        s.alpha = 0.5
    _check_sequence(s, 1 - s.gamma, increasing=False)


def _check_e3(s: ExampleSpec) -> None:
    assert s.p is not None
    if s.n != 1:
        raise ValueError("E3 lives on the line")
    if not s.p > 1:
        raise ValueError(f"E3 needs p > 1, got {s.p}")
    if s.gamma == 1:
        raise ValueError("E3 needs γ != 1")
    if s.variant == "oscillating" and s.gamma == 0:
        raise ValueError("the oscillating E3 variant needs γ != 0")


def _check_e4(s: ExampleSpec) -> None:
    assert s.p is not None
    if s.gamma != s.n:
        raise ValueError(f"E4 is the γ = n example, got γ={s.gamma} with n={s.n}")
    if not s.p > 1:
        raise ValueError(f"E4 needs p > 1, got {s.p}")
    if s.variant == "self_similar" and s.alpha is not None:
        raise ValueError("the k^{-α/p} modification of E4 has no self-similar form")


def _check_e5(s: ExampleSpec) -> None:
    assert s.p is not None and s.gamma is not None
    if not 0 < s.gamma < s.n:
        raise ValueError(f"E5 needs 0 < γ < n = {s.n}, got {s.gamma}")
    if not s.p > 1:
        raise ValueError(f"E5 needs p > 1, got {s.p}")
    _check_sequence(s, s.n - s.gamma, increasing=True)
    first = s.n_sequence()[0]
    if not first > s.n / s.gamma:
        raise ValueError(f"E5 needs n_1 > n/γ = {s.n / s.gamma}, got {first}")


def _check_e6(s: ExampleSpec) -> None:
    assert s.p is not None and s.gamma is not None
    if s.n != 1:
        raise ValueError("E6 lives on the line")
    if not s.p > 1:
        raise ValueError(f"E6 needs p > 1, got {s.p}")
    if not s.gamma > 0:
        raise ValueError(f"E6 needs γ > 0, got {s.gamma}")
    if s.separation < 1:
        raise ValueError(f"separation must be at least 1, got {s.separation}")
    if s.variant == "tilde" and s.depth < 2:
        raise ValueError(f"the Lipschitz bumps need depth >= 2 to resolve their plateau, got {s.depth}")


def _check_sequence(s: ExampleSpec, rate: float, increasing: bool) -> None:
    if s.sequence is None:
        return
    assert s.truncation is not None
    if len(s.sequence) < s.truncation:
        raise ValueError(f"need {s.truncation} sequence terms, got {len(s.sequence)}")
    seq = s.sequence[: s.truncation]
    if increasing and any(b <= a for a, b in zip(seq, seq[1:], strict=False)):
        raise ValueError(f"the sequence must increase, got {seq}")
    for k, m in enumerate(seq, start=1):
        if m < 1:
            raise ValueError(f"sequence terms must be positive, got n_{k}={m}")
        if not _eps_ok(m * rate, k):
            raise ValueError(f"n_{k}={m} gives 2^(n_k rate) < 2^{k} or ε_{k} > 2^-{k}")


_CHECKS = {
    "E0": _check_e0,
    "E1": _check_e1,
    "E2": _check_e2,
    "E3": _check_e3,
    "E4": _check_e4,
    "E5": _check_e5,
    "E6": _check_e6,
}

_VARIANTS: dict[str, tuple[str, ...]] = {
    "E3": ("oscillating",),
    "E4": ("self_similar",),
    "E6": ("tilde",),
}
