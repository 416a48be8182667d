"""Oscillation sums along nested dyadic chains Q0 ⊃ Q1 ⊃ ... of a normalized function."""

from __future__ import annotations

import math
from dataclasses import dataclass

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.errors import ParameterError, VerificationError
from dyadnorm.function.field import Field
from dyadnorm.function.step import StepFunction
from dyadnorm.norms.lebesgue import region_distribution
from dyadnorm.norms.weak import op_norm
from dyadnorm.profile.build import build_osc_profile

_SLACK = 1 + 1e-9


@dataclass(frozen=True)
class ChainRecord:
    leaf: DyadicCube
    oscillations: tuple[float, ...]

    @property
    def total(self) -> float:
        return math.fsum(self.oscillations)

    def partial(self, k: int) -> float:
        return math.fsum(self.oscillations[:k])


@dataclass(frozen=True)
class ChainStats:
    root: DyadicCube
    p: float
    normalization: float
    chains: tuple[ChainRecord, ...]
    max_chain_sum: float
    chain_constant: float
    uniform_bound: float | None
    counts: tuple[tuple[int, float], ...]
    distribution_constant: float
    thresholds: tuple[tuple[int, float], ...]

    def summary(self) -> dict[str, object]:
        return {
            "root": format_cube(self.root),
            "p": self.p,
            "normalization": self.normalization,
            "leaves": len(self.chains),
            "max_chain_sum": self.max_chain_sum,
            "chain_constant": self.chain_constant,
            "uniform_bound": self.uniform_bound,
            "distribution_constant": self.distribution_constant,
        }


def count_bound(K: int, n: int) -> float:  # noqa: N803
    """S(K) = sum over l >= 1 of 2^{1-l} min(2^{ln}, K)."""
    if K <= 0:
        return 0.0
    total = 0.0
    level = 1
    while 2.0 ** (level * n) < K:
        total += 2.0 ** (1 - level + level * n)
        level += 1
    return total + K * 2.0 ** (2 - level)


def geometric_bound(side: float, n: int, p: float) -> float:
    """sum over i >= 0 of (2^{-i} side)^{1-n/p}."""
    e = 1.0 - n / p
    return side**e / (1.0 - 2.0**-e)


def chain_oscillation_stats(
    f: StepFunction,
    Q0: DyadicCube,  # noqa: N803
    p: float,
    settings: DyadnormSettings | None = None,
) -> ChainStats:
    """Chain sums, the count profile #{Q: O(f,Q) > 2^{-l}} and the level-set constant for f / ||f||_{O^p(Q0)}.

    For p = n every partial sum of the first K oscillations is checked against
    count_bound(K); for p > n every chain sum against geometric_bound.
    """
    n = f.dimension
    if Q0.lattice != 0 or Q0.dimension != n:
        raise ParameterError(f"chains are taken in the standard lattice of R^{n}, got {Q0}")
    if not p >= n:
        raise ParameterError(f"chain bounds need p >= n = {n}, got {p}")
    if f.tail is not None:
        raise ParameterError("chain statistics need a finite tree")
    settings = settings or load_settings()
    norm = op_norm(f, None, p, 0.0, p, "osc", scope=Q0, settings=settings).value
    if math.isinf(norm):
        raise ParameterError(f"||f||_(O^p) on {Q0} is infinite; nothing to normalize")
    depth = max(Q0.level - f.finest_level, 1)
    if norm == 0:
        return ChainStats(Q0, p, 0.0, (), 0.0, 0.0, None, (), 0.0, ())
    g = f.scaled(1.0 / norm)
    field = Field(g)
    cache: dict[DyadicCube, float] = {}

    def osc(cube: DyadicCube) -> float:
        value = cache.get(cube)
        if value is None:
            value = cache[cube] = field.oscillation(cube)
        return value

    chains: list[ChainRecord] = []
    for leaf, _ in g.restricted(Q0).leaves(settings.max_cubes):
        path = [leaf.ancestor(k) for k in range(Q0.level - leaf.level, 0, -1)]
        chains.append(ChainRecord(leaf, tuple(osc(q) for q in path)))

    exponent = (n - 1) / n
    uniform = geometric_bound(float(Q0.side), n, p) if p > n else None
    chain_constant = 0.0
    for chain in chains:
        for k in range(1, len(chain.oscillations) + 1):
            partial = chain.partial(k)
            if uniform is None:
                limit = count_bound(k, n)
                if partial > limit * _SLACK:
                    raise VerificationError(
                        f"chain sum {partial} over {k} cubes above {chain.leaf} exceeds {limit}",
                        {"leaf": format_cube(chain.leaf), "k": k, "sum": partial},
                    )
            chain_constant = max(chain_constant, partial / k**exponent)
        if uniform is not None and chain.total > uniform * _SLACK:
            raise VerificationError(
                f"chain sum {chain.total} above {chain.leaf} exceeds {uniform}",
                {"leaf": format_cube(chain.leaf), "sum": chain.total},
            )

    profile = build_osc_profile(g, None, 0.0, float(n), p, scope=Q0)
    counts = tuple((level, profile.W(2.0**-level)) for level in range(depth + 1))

    dist, _ = region_distribution(g, None, Q0, centered=True)
    thresholds = []
    constant = 0.0
    for K in range(1, depth + 1):  # noqa: N806
        v = dist.quantile_threshold(2.0**-K)
        thresholds.append((K, v))
        constant = max(constant, v / K**exponent)
    return ChainStats(
        root=Q0,
        p=p,
        normalization=norm,
        chains=tuple(chains),
        max_chain_sum=max((c.total for c in chains), default=0.0),
        chain_constant=chain_constant,
        uniform_bound=uniform,
        counts=counts,
        distribution_constant=constant,
        thresholds=tuple(thresholds),
    )
