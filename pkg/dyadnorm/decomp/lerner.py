"""Contracting oscillation decompositions |f - f_{Q0}| <= C sum_k sum_{Q in P_k} O(f,Q) χ_Q.

Generation 0 is {Q0}. Inside every cube Q of generation k the next generation
takes the maximal subcubes Q' with mean(|f - f_Q|, Q') > T O(f,Q). With
T = 2^{n+2} a selected cube covers at most 2^{-n-2} of its parent's measure
and the domination holds with C = D T, D the dyadic doubling constant of mu
(2^n for Lebesgue measure). Every result is checked before it
is returned; a failed check doubles T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import yaml

from dyadnorm.config.settings import DyadnormSettings, load_settings
from dyadnorm.decomp.stopping import select_maximal
from dyadnorm.dyadic.collection import CubeCollection
from dyadnorm.dyadic.cube import DyadicCube, format_cube
from dyadnorm.errors import BudgetError, ParameterError, VerificationError
from dyadnorm.function.field import Field
from dyadnorm.function.measure import DyadicMeasure
from dyadnorm.function.step import StepFunction

_MAX_GENERATIONS = 512


@dataclass(frozen=True)
class ContractingDecomposition:
    root: DyadicCube
    generations: tuple[CubeCollection, ...]
    threshold: float
    domination_constant: float
    rigorous_bound: float
    escalations: int = 0
    decay: tuple[float, ...] = ()
    mu_decay: tuple[float, ...] = ()
    oscillations: dict[DyadicCube, float] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not self.generations

    def summary(self) -> dict[str, object]:
        return {
            "root": format_cube(self.root),
            "generations": len(self.generations),
            "cubes": sum(len(g) for g in self.generations),
            "threshold": self.threshold,
            "domination_constant": self.domination_constant,
            "rigorous_bound": self.rigorous_bound,
            "escalations": self.escalations,
            "decay": list(self.decay),
            "mu_decay": list(self.mu_decay),
        }


def lerner_decomposition(
    f: StepFunction,
    Q0: DyadicCube,  # noqa: N803
    mu: DyadicMeasure | None = None,
    settings: DyadnormSettings | None = None,
) -> ContractingDecomposition:
    """Build and verify a contracting decomposition of f over Q0."""
    if Q0.lattice != 0 or Q0.dimension != f.dimension:
        raise ParameterError(f"decompositions are built over standard-lattice cubes of R^{f.dimension}")
    if f.tail is not None:
        raise ParameterError("decompositions need a finite tree; truncate the self-similar tail first")
    settings = settings or load_settings()
    fld = Field(f, mu)
    doubling = fld.mu.doubling_bound()
    threshold = 2.0 ** (f.dimension + 2)
    if fld.oscillation(Q0) == 0:
        return ContractingDecomposition(Q0, (), threshold, 0.0, doubling * threshold)
    failure: VerificationError | None = None
    for escalation in range(settings.lerner_max_escalations + 1):
        generations, oscillations = _construct(fld, Q0, threshold, settings.max_cubes)
        try:
            constant, decay, mu_decay = _verify(fld, f, Q0, generations, oscillations, doubling * threshold, settings.max_cubes)
        except VerificationError as e:
            failure = e
            threshold *= 2
            continue
        return ContractingDecomposition(
            root=Q0,
            generations=tuple(generations),
            threshold=threshold,
            domination_constant=constant,
            rigorous_bound=doubling * threshold,
            escalations=escalation,
            decay=tuple(decay),
            mu_decay=tuple(mu_decay),
            oscillations=oscillations,
        )
    assert failure is not None
    raise failure


def _construct(
    fld: Field, root: DyadicCube, threshold: float, max_cubes: int
) -> tuple[list[CubeCollection], dict[DyadicCube, float]]:
    oscillations = {root: fld.oscillation(root)}
    generations = [CubeCollection.from_cubes([root])]
    total = 1
    while len(generations) < _MAX_GENERATIONS:
        following: list[DyadicCube] = []
        for cube in generations[-1]:
            o = oscillations[cube]
            if o == 0:
                continue
            center = fld.mean(cube)
            for chosen in select_maximal(fld, cube, center, threshold * o, False, max_cubes):
                oscillations[chosen] = fld.oscillation(chosen)
                following.append(chosen)
        if not following:
            break
        total += len(following)
        if total > max_cubes:
            raise BudgetError(f"decomposition holds more than {max_cubes} cubes")
        generations.append(CubeCollection.from_cubes(following))
    return generations, oscillations


def _verify(
    fld: Field,
    f: StepFunction,
    root: DyadicCube,
    generations: list[CubeCollection],
    oscillations: dict[DyadicCube, float],
    bound: float,
    max_cubes: int,
) -> tuple[float, list[float], list[float]]:
    """Measured domination constant with the Lebesgue and mu shares of each generation.

    The 2^-k bound is checked on the Lebesgue share for Lebesgue measure and on the
    mu share otherwise.
    """
    for k in range(1, len(generations)):
        above = generations[k - 1].cubes
        for cube in generations[k]:
            if not any(a in above for a in _ancestors_to(cube, root)):
                raise VerificationError(
                    f"{cube} of generation {k} lies in no cube of generation {k - 1}",
                    {"cube": format_cube(cube), "generation": k},
                )
    root_mass = fld.mass(root)
    decay: list[float] = []
    mu_decay: list[float] = []
    for k, generation in enumerate(generations):
        share = float(generation.union_volume / root.volume)
        decay.append(share)
        if fld.mu.is_lebesgue:
            if share > Fraction(1, 2**k):
                raise VerificationError(
                    f"generation {k} covers {share} of the root's volume, more than 2^-{k}",
                    {"generation": k, "share": share, "measure": "lebesgue"},
                )
            continue
        mu_share = sum(fld.mass(q) for q in generation) / root_mass
        mu_decay.append(mu_share)
        if mu_share > 2.0**-k * (1 + 1e-12):
            raise VerificationError(
                f"generation {k} covers {mu_share} of the root's mu-measure, more than 2^-{k}",
                {"generation": k, "share": mu_share, "measure": "mu"},
            )
    selected = set(oscillations)
    center = fld.mean(root)
    worst = 0.0
    for cube, value in f.restricted(root).leaves(max_cubes):
        if fld.mass(cube) == 0:
            continue
        gap = abs(value - center)
        if gap == 0:
            continue
        total = sum(oscillations[a] for a in _ancestors_to(cube, root, inclusive=True) if a in selected)
        ratio = gap / total if total > 0 else math.inf
        if ratio > bound * (1 + 1e-9):
            raise VerificationError(
                f"|f - f_Q0| = {gap} at {cube} exceeds {bound} times the oscillation sum {total}",
                {"cube": format_cube(cube), "gap": gap, "sum": total},
            )
        worst = max(worst, ratio)
    return worst, decay, mu_decay


def _ancestors_to(cube: DyadicCube, root: DyadicCube, inclusive: bool = False) -> list[DyadicCube]:
    out = [cube] if inclusive else []
    current = cube
    for _ in range(root.level - cube.level):
        current = current.parent()
        out.append(current)
    return out


def dumps_decomposition(dec: ContractingDecomposition) -> str:
    """One ``k<TAB>cube<TAB>O(f,Q)`` line per selected cube, then a YAML summary block."""
    lines = []
    for k, generation in enumerate(dec.generations):
        for cube in generation:
            lines.append(f"{k}\t{format_cube(cube)}\t{dec.oscillations.get(cube, 0.0)!r}")
    summary = yaml.safe_dump(dec.summary(), sort_keys=True)
    return "\n".join(lines) + ("\n" if lines else "") + "---\n" + summary
