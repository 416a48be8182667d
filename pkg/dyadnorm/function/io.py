"""Function file format: YAML frontmatter header plus one ``<cube> <value>`` line per leaf."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Literal

import frontmatter
from pydantic import BaseModel, Field

from dyadnorm.dyadic.cube import DyadicCube, format_cube, parse_cube
from dyadnorm.errors import ParameterError
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction


class FunctionHeader(BaseModel):
    """Header of a function file."""

    kind: Literal["function", "density"] = "function"
    dimension: int = Field(ge=1)
    frame_level: int | None = None
    outside_value: float = 0.0
    measure: str = "lebesgue"


def parse_value(text: str) -> float:
    """Float, or an exact rational written p/q."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"not a number: {text!r}") from None


def format_value(value: float) -> str:
    return repr(float(value))


def loads_function(text: str) -> tuple[FunctionHeader, StepFunction]:
    post = frontmatter.loads(text)
    meta = dict(post.metadata)
    if "dimension" not in meta:
        raise ParameterError("function file must include 'dimension' in its header")
    try:
        header = FunctionHeader(**meta)
    except ValueError as e:
        raise ParameterError(f"bad function header: {e}") from None
    leaves: list[tuple[DyadicCube, float]] = []
    for number, line in enumerate(post.content.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.rsplit(maxsplit=1)
        if len(parts) != 2:
            raise ParameterError(f"line {number}: expected '<cube> <value>', got {line!r}")
        cube = parse_cube(parts[0])
        if cube.dimension != header.dimension:
            raise ParameterError(f"line {number}: {cube} is not {header.dimension}-dimensional")
        leaves.append((cube, parse_value(parts[1])))
    f = StepFunction.from_leaves(
        leaves,
        frame_level=header.frame_level,
        outside_value=header.outside_value,
        dimension=header.dimension,
    )
    return header, f


def read_function(path: Path) -> StepFunction:
    if not path.exists():
        raise FileNotFoundError(f"Function file not found: {path}")
    header, f = loads_function(path.read_text(encoding="utf-8"))
    if header.kind != "function":
        raise ParameterError(f"{path} holds a {header.kind}, not a function")
    return f


def read_measure(path: Path) -> DyadicMeasure:
    if not path.exists():
        raise FileNotFoundError(f"Measure file not found: {path}")
    header, density = loads_function(path.read_text(encoding="utf-8"))
    if header.kind != "density":
        raise ParameterError(f"{path} holds a {header.kind}, not a density")
    return DyadicMeasure(density)


def resolve_measure(header_measure: str, base: Path, dimension: int) -> DyadicMeasure:
    """The measure a function file refers to: ``lebesgue`` or a density file next to it."""
    if header_measure == "lebesgue":
        return DyadicMeasure.lebesgue(dimension)
    return read_measure(base / header_measure)


def dumps_function(f: StepFunction, kind: Literal["function", "density"] = "function") -> str:
    if f.tail is not None:
        raise ParameterError("functions with a self-similar tail have no finite leaf file")
    header = FunctionHeader(kind=kind, dimension=f.dimension, outside_value=f.outside_value)
    lines = [f"{format_cube(q)} {format_value(v)}" for q, v in f.leaves() if v != f.outside_value]
    meta = header.model_dump(exclude_none=True)
    if f.cells:
        meta["frame_level"] = f.frame_level
    post = frontmatter.Post("\n".join(lines), **meta)
    return frontmatter.dumps(post) + "\n"


def write_function(f: StepFunction, path: Path, kind: Literal["function", "density"] = "function") -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_function(f, kind), encoding="utf-8")
    return path


def read_function_and_measure(path: Path) -> tuple[StepFunction, DyadicMeasure]:
    """Function file plus the measure its header names."""
    if not path.exists():
        raise FileNotFoundError(f"Function file not found: {path}")
    header, f = loads_function(path.read_text(encoding="utf-8"))
    if header.kind != "function":
        raise ParameterError(f"{path} holds a {header.kind}, not a function")
    return f, resolve_measure(header.measure, path.parent, header.dimension)
