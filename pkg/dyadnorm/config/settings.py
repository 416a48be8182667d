"""Application settings via Pydantic BaseSettings."""

from __future__ import annotations

from pathlib import Path

from pydantic import model_validator
from pydantic_settings import BaseSettings


class DyadnormSettings(BaseSettings):
    """Numerical budgets and defaults from environment variables and .env files."""

    model_config = {"env_prefix": "DYADNORM_", "env_file": ".env", "extra": "ignore"}

    workers: int = 1
    max_nodes: int = 2_000_000
    max_cubes: int = 200_000
    max_tail_terms: int = 512
    tail_span_bits: int = 64
    garo_max_table: int = 1 << 20
    quadrature_tolerance: float = 1e-6
    quadrature_max_samples: int = 1 << 16
    lerner_max_escalations: int = 8
    float_digits: int = 17
    run_base: Path = Path(".dyadnorm/runs")
    pilot_constant: float = 64.0

    @model_validator(mode="after")
    def check_budgets(self) -> DyadnormSettings:
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.max_tail_terms < 8:
            raise ValueError(f"max_tail_terms must be at least 8, got {self.max_tail_terms}")
        if not 0.0 < self.quadrature_tolerance < 1.0:
            raise ValueError(
                f"quadrature_tolerance must lie in (0, 1), got {self.quadrature_tolerance}"
            )
        if not 1 <= self.float_digits <= 17:
            raise ValueError(f"float_digits must lie in [1, 17], got {self.float_digits}")
        if self.tail_span_bits < 8:
            raise ValueError(f"tail_span_bits must be at least 8, got {self.tail_span_bits}")
        return self


def load_settings(**overrides: object) -> DyadnormSettings:
    """Load settings with optional overrides (useful for CLI args)."""
    return DyadnormSettings(**{k: v for k, v in overrides.items() if v is not None})  # type: ignore[arg-type]
