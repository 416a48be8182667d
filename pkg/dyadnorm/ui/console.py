"""Rich console output for dyadnorm."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from dyadnorm import __version__
from dyadnorm.norms.results import NormResult, format_float
from dyadnorm.profile.evaluate import ProfileRow
from dyadnorm.verify.report import ClaimReport


class ConsoleUI:
    """Rich-powered console output for dyadnorm commands."""

    def __init__(self, console: Console | None = None, digits: int = 17) -> None:
        self.console = console or Console()
        self.digits = digits

    def header(self, command: str, config: dict[str, Any]) -> None:
        lines = [f"[bold white]{command}[/bold white]"]
        lines += [f"{key} = [cyan]{config[key]}[/cyan]" for key in sorted(config) if key != "command"]
        self.console.print(
            Panel(
                "\n".join(lines),
                title=f"[bold blue]dyadnorm[/bold blue] v{__version__}",
                border_style="blue",
            )
        )

    def norm_results(self, results: Sequence[NormResult]) -> None:
        table = Table(title="Norms", show_header=True, header_style="bold")
        table.add_column("Norm", style="cyan")
        table.add_column("Value", justify="right")
        table.add_column("Exactness", justify="center")
        table.add_column("Witness")

        for r in results:
            value = format_float(r.value, self.digits)
            style = "red" if r.is_infinite else "white"
            witness = ", ".join(r.witness[:3]) + (" ..." if len(r.witness) > 3 else "")
            exact = "[green]exact[/green]" if r.exactness == "exact" else f"[yellow]{r.exactness}[/yellow]"
            table.add_row(r.norm, f"[{style}]{value}[/{style}]", exact, witness)

        self.console.print(table)
        for r in results:
            if "divergence" in r.details:
                self.console.print(f"  [red]divergence:[/red] {r.details['divergence']}")

    def profile_summary(self, rows: Sequence[ProfileRow], p: float) -> None:
        if not rows:
            self.console.print("  [dim]empty profile[/dim]")
            return
        best = max(rows, key=lambda r: r.lam_p_W)
        tails = sum(1 for r in rows if r.source == "tail")
        self.console.print(
            f"  {len(rows)} breakpoints ({tails} from tails); "
            f"sup λ^{p:g} W(λ) ≈ {format_float(best.lam_p_W, self.digits)} "
            f"at λ = {format_float(best.lam, self.digits)}"
        )

    def verdicts(self, reports: Sequence[ClaimReport]) -> None:
        table = Table(title="Verdicts", show_header=True, header_style="bold")
        table.add_column("Claim", style="cyan")
        table.add_column("Verdict", justify="center")
        table.add_column("Failed checks")

        for r in reports:
            status = "[green]✓ consistent[/green]" if r.passed else "[red]✗ inconsistent[/red]"
            table.add_row(r.claim, status, ", ".join(r.failed_checks()))

        self.console.print(table)

    def facts(self, title: str, facts: dict[str, Any]) -> None:
        table = Table(title=title, show_header=True, header_style="bold")
        table.add_column("Fact", style="cyan")
        table.add_column("Value")
        for key in sorted(facts):
            value = facts[key]
            text = format_float(value, self.digits) if isinstance(value, float) else str(value)
            if len(text) > 100:
                text = text[:97] + "..."
            table.add_row(key, text)
        self.console.print(table)

    def written(self, paths: Sequence[Path]) -> None:
        for path in paths:
            self.console.print(f"  [dim]wrote {path}[/dim]")
