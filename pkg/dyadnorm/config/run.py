"""Run configuration: a flat key=value file merged with command-line flags."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, field_validator, model_validator

from dyadnorm.constructions.spec import ExampleId, ExampleSpec, Variant
from dyadnorm.dyadic.cube import DyadicCube, parse_cube
from dyadnorm.errors import ParameterError
from dyadnorm.profile.models import Kind, LevelWindow

Command = Literal["norm", "profile", "verify", "example", "sweep", "decompose"]
NormName = Literal["op", "lattices", "envelope", "lp", "weak_lp", "jn", "garo", "halfspace"]
OutputFormat = Literal["json", "csv", "svg"]

_NEEDS_INPUT = ("norm", "profile", "example", "decompose")
# parameters of ExampleSpec that are free for each id; the rest are fixed by the construction
_FREE_GAMMA = ("E2", "E3", "E5", "E6")


class RunConfig(BaseModel):
    """Everything a command needs; echoed into the header of every output."""

    model_config = {"extra": "forbid"}

    command: Command
    file: Path | None = None
    example: ExampleId | None = None
    n: int = 1
    truncation: int | None = None
    alpha: float | None = None
    variant: Variant = "base"
    separation: int = 8
    depth: int = 6
    norm: NormName = "op"
    p: float = 1.0
    gamma1: float = 0.0
    gamma2: float | None = None
    kind: Kind = "osc"
    scope: str | None = None
    k_min: int | None = None
    k_max: int | None = None
    lattice: int = 0
    claims: list[str] = []
    theorems: bool = False
    samples: int | None = None
    q: float = 2.0
    values: list[int] = []
    out: Path | None = None
    formats: list[OutputFormat] = ["json"]
    workers: int = 1
    seed: int = 0
    allow_truncation: bool = False

    @field_validator("claims", "formats", "values", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @model_validator(mode="after")
    def check_inputs(self) -> RunConfig:
        if self.command in _NEEDS_INPUT and (self.file is None) == (self.example is None):
            raise ValueError(f"{self.command} needs exactly one of file or example")
        if self.command == "sweep" and self.example is None:
            raise ValueError("sweep runs over the truncations of an example; set example")
        if self.command == "sweep" and not self.values:
            raise ValueError("sweep needs values, e.g. values=4,8,12")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.k_min is not None and self.k_max is not None and self.k_min > self.k_max:
            raise ValueError(f"empty window [{self.k_min}, {self.k_max}]")
        if self.scope is not None:
            parse_cube(self.scope)
        return self

    @property
    def window(self) -> LevelWindow:
        return LevelWindow(self.k_min, self.k_max)

    @property
    def scope_cube(self) -> DyadicCube | None:
        return parse_cube(self.scope) if self.scope is not None else None

    def example_spec(self, truncation: int | None = None) -> ExampleSpec:
        if self.example is None:
            raise ParameterError("no example configured")
        fields: dict[str, Any] = {
            "id": self.example,
            "n": self.n,
            "truncation": truncation if truncation is not None else self.truncation,
            "alpha": self.alpha,
            "variant": self.variant,
            "separation": self.separation,
            "depth": self.depth,
            "seed": self.seed,
        }
        if self.example not in ("E1", "E2"):
            fields["p"] = self.p
        if self.example in _FREE_GAMMA and self.gamma1 != 0:
            fields["gamma"] = self.gamma1
        return ExampleSpec.model_validate({k: v for k, v in fields.items() if v is not None})

    def header(self) -> dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True, exclude_defaults=True) | {
            "command": self.command
        }


def load_run_config(command: str, path: Path | None = None, **flags: Any) -> RunConfig:
    """File values first, then every flag that was given; ``gamma`` sets both γ1 and γ2."""
    values: dict[str, Any] = {}
    if path is not None:
        if not path.is_file():
            raise ParameterError(f"config file not found: {path}")
        from_file = {
            key.strip().lower().replace("-", "_"): value
            for key, value in dotenv_values(path).items()
            if value is not None and value != ""
        }
        values.update(_expand_gamma(from_file))
    values.update(_expand_gamma({k: v for k, v in flags.items() if v is not None}))
    values["command"] = command
    return RunConfig.model_validate(values)


def _expand_gamma(values: dict[str, Any]) -> dict[str, Any]:
    gamma = values.pop("gamma", None)
    if gamma is not None:
        values.setdefault("gamma1", gamma)
        values.setdefault("gamma2", gamma)
    return values
