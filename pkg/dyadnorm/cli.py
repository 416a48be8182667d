"""CLI entry point using Typer."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.markup import escape

from dyadnorm import __version__

app = typer.Typer(
    name="dyadnorm",
    help="Dyadic weak-type quasi-norms, oscillation functionals and their counterexamples",
    no_args_is_help=True,
)
console = Console()

CONFIG = typer.Option(None, "--config", "-c", help="Flat key=value run configuration file")
FILE = typer.Option(None, "--file", "-f", help="Function file (YAML header + cube lines)")
EXAMPLE = typer.Option(None, "--example", "-e", help="Example id E0..E6")
DIMENSION = typer.Option(None, "--n", help="Dimension of the example")
TRUNCATION = typer.Option(None, "--truncation", "--K", "-K", help="Truncation N, K or M of the example")
ALPHA = typer.Option(None, "--alpha", help="Decay α of the modified examples")
VARIANT = typer.Option(None, "--variant", help="base | oscillating | self_similar | tilde")
SEPARATION = typer.Option(None, "--separation", help="Separation N of the sparse intervals")
DEPTH = typer.Option(None, "--depth", help="Resolution depth of the example")
P = typer.Option(None, "--p", "-p", help="Exponent p")
GAMMA = typer.Option(None, "--gamma", help="Sets both γ1 and γ2")
GAMMA1 = typer.Option(None, "--gamma1", help="Exponent γ1 of the cube coefficient")
GAMMA2 = typer.Option(None, "--gamma2", help="Exponent γ2 of the cube weight (defaults to p)")
KIND = typer.Option(None, "--kind", help="osc | mean")
SCOPE = typer.Option(None, "--scope", help="Restrict to the subcubes of a cube, e.g. 'L0:k0:(0)'")
K_MIN = typer.Option(None, "--k-min", help="Finest level of the window")
K_MAX = typer.Option(None, "--k-max", help="Coarsest level of the window")
LATTICE = typer.Option(None, "--lattice", help="Shifted lattice id")
OUT = typer.Option(None, "--out", "-o", help="Output directory (defaults to the run directory)")
FORMAT = typer.Option(None, "--format", help="Extra outputs: json, csv, svg (repeatable)")
WORKERS = typer.Option(None, "--workers", "-w", help="Worker threads")
SEED = typer.Option(None, "--seed", help="Random seed")
ALLOW_TRUNCATION = typer.Option(
    False, "--allow-truncation", help="Accept results computed over a truncated window"
)


@app.command()
def norm(
    config: Path = CONFIG,
    file: Path = FILE,
    example: str = EXAMPLE,
    n: int = DIMENSION,
    truncation: int = TRUNCATION,
    alpha: float = ALPHA,
    variant: str = VARIANT,
    separation: int = SEPARATION,
    depth: int = DEPTH,
    which: str = typer.Option(
        None, "--norm", help="op | lattices | envelope | lp | weak_lp | jn | garo | halfspace"
    ),
    p: float = P,
    gamma: float = GAMMA,
    gamma1: float = GAMMA1,
    gamma2: float = GAMMA2,
    kind: str = KIND,
    scope: str = SCOPE,
    k_min: int = K_MIN,
    k_max: int = K_MAX,
    lattice: int = LATTICE,
    out: Path = OUT,
    formats: list[str] = FORMAT,
    workers: int = WORKERS,
    seed: int = SEED,
    allow_truncation: bool = ALLOW_TRUNCATION,
) -> None:
    """Compute a norm of a function file or an example."""
    _execute(
        "norm",
        config,
        file=file,
        example=example,
        n=n,
        truncation=truncation,
        alpha=alpha,
        variant=variant,
        separation=separation,
        depth=depth,
        norm=which,
        p=p,
        gamma=gamma,
        gamma1=gamma1,
        gamma2=gamma2,
        kind=kind,
        scope=scope,
        k_min=k_min,
        k_max=k_max,
        lattice=lattice,
        out=out,
        formats=formats or None,
        workers=workers,
        seed=seed,
        allow_truncation=allow_truncation or None,
    )


@app.command()
def profile(
    config: Path = CONFIG,
    file: Path = FILE,
    example: str = EXAMPLE,
    n: int = DIMENSION,
    truncation: int = TRUNCATION,
    alpha: float = ALPHA,
    variant: str = VARIANT,
    depth: int = DEPTH,
    p: float = P,
    gamma: float = GAMMA,
    gamma1: float = GAMMA1,
    gamma2: float = GAMMA2,
    kind: str = KIND,
    scope: str = SCOPE,
    k_min: int = K_MIN,
    k_max: int = K_MAX,
    lattice: int = LATTICE,
    out: Path = OUT,
    formats: list[str] = FORMAT,
    allow_truncation: bool = ALLOW_TRUNCATION,
) -> None:
    """Write the λ-profile (lambda, W, lambda_p_W, source) as CSV, optionally as SVG."""
    _execute(
        "profile",
        config,
        file=file,
        example=example,
        n=n,
        truncation=truncation,
        alpha=alpha,
        variant=variant,
        depth=depth,
        p=p,
        gamma=gamma,
        gamma1=gamma1,
        gamma2=gamma2,
        kind=kind,
        scope=scope,
        k_min=k_min,
        k_max=k_max,
        lattice=lattice,
        out=out,
        formats=formats or None,
        allow_truncation=allow_truncation or None,
    )


@app.command()
def verify(
    config: Path = CONFIG,
    claims: list[str] = typer.Option(
        None, "--claim", help="Claim id 1..4 or theorem tag (repeatable); all claims by default"
    ),
    theorems: bool = typer.Option(False, "--theorems", help="Also run every theorem sweep"),
    samples: int = typer.Option(None, "--samples", help="Random functions per theorem sweep"),
    out: Path = OUT,
    formats: list[str] = FORMAT,
    workers: int = WORKERS,
    seed: int = SEED,
) -> None:
    """Run claim checks and theorem sweeps; exit 1 on any inconsistent verdict."""
    _execute(
        "verify",
        config,
        claims=claims or None,
        theorems=theorems or None,
        samples=samples,
        out=out,
        formats=formats or None,
        workers=workers,
        seed=seed,
    )


@app.command()
def example(
    name: str = typer.Argument(..., help="Example id E0..E6"),
    config: Path = CONFIG,
    n: int = DIMENSION,
    truncation: int = TRUNCATION,
    alpha: float = ALPHA,
    variant: str = VARIANT,
    separation: int = SEPARATION,
    depth: int = DEPTH,
    p: float = P,
    gamma: float = GAMMA,
    out: Path = OUT,
    seed: int = SEED,
) -> None:
    """Build an example, print its construction facts and write its function file."""
    _execute(
        "example",
        config,
        example=name,
        n=n,
        truncation=truncation,
        alpha=alpha,
        variant=variant,
        separation=separation,
        depth=depth,
        p=p,
        gamma1=gamma,
        out=out,
        seed=seed,
    )


@app.command()
def sweep(
    values: str = typer.Option(..., "--values", help="Comma-separated truncations, e.g. 4,8,12"),
    config: Path = CONFIG,
    example: str = EXAMPLE,
    n: int = DIMENSION,
    alpha: float = ALPHA,
    variant: str = VARIANT,
    separation: int = SEPARATION,
    depth: int = DEPTH,
    which: str = typer.Option(None, "--norm", help="Norm to track across the truncations"),
    p: float = P,
    gamma: float = GAMMA,
    gamma1: float = GAMMA1,
    gamma2: float = GAMMA2,
    kind: str = KIND,
    scope: str = SCOPE,
    out: Path = OUT,
    formats: list[str] = FORMAT,
    allow_truncation: bool = ALLOW_TRUNCATION,
) -> None:
    """Track a norm of an example across truncation levels."""
    _execute(
        "sweep",
        config,
        values=values,
        example=example,
        n=n,
        alpha=alpha,
        variant=variant,
        separation=separation,
        depth=depth,
        norm=which,
        p=p,
        gamma=gamma,
        gamma1=gamma1,
        gamma2=gamma2,
        kind=kind,
        scope=scope,
        out=out,
        formats=formats or None,
        allow_truncation=allow_truncation or None,
    )


@app.command()
def decompose(
    config: Path = CONFIG,
    file: Path = FILE,
    example: str = EXAMPLE,
    n: int = DIMENSION,
    truncation: int = TRUNCATION,
    p: float = P,
    scope: str = SCOPE,
    out: Path = OUT,
    formats: list[str] = FORMAT,
) -> None:
    """Contracting decomposition over a cube, with chain statistics when p >= n."""
    _execute(
        "decompose",
        config,
        file=file,
        example=example,
        n=n,
        truncation=truncation,
        p=p,
        scope=scope,
        out=out,
        formats=formats or None,
    )


@app.command()
def version() -> None:
    """Print the version."""
    console.print(f"dyadnorm {__version__}")


def _execute(command: str, config_path: Path | None, **flags: Any) -> None:
    from dyadnorm.config.run import load_run_config
    from dyadnorm.config.settings import load_settings
    from dyadnorm.errors import TruncationError, VerificationError
    from dyadnorm.orchestrator import Orchestrator

    try:
        config = load_run_config(command, config_path, **flags)
        workers = config.workers if "workers" in config.model_fields_set else None
        settings = load_settings(workers=workers)
        outcome = getattr(Orchestrator(settings, console), command)(config)
    except TruncationError as e:
        console.print(f"[red]Truncated result:[/red] {escape(str(e))}")
        raise typer.Exit(3) from None
    except VerificationError as e:
        console.print(f"[red]Internal check failed:[/red] {escape(str(e))}")
        raise typer.Exit(1) from None
    except (ValueError, FileNotFoundError) as e:
        console.print(f"[red]Parameter error:[/red] {escape(str(e))}")
        raise typer.Exit(2) from None

    if command == "verify" and not all(r.passed for r in outcome):
        raise typer.Exit(1)


def main() -> None:
    app()
