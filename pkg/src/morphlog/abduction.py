"""Explanations obtained by eroding the background theory.

An observation ``alpha`` is explained by ``gamma`` when, inside the
background theory ``sigma``, ``gamma`` selects the most central models of
``alpha``.  Centrality comes from successive erosions:

* ``lneu`` and ``lned`` use the last nonempty erosion of ``sigma & alpha``;
  ``lneu`` asks for equivalence with it modulo ``sigma``, ``lned`` only for
  entailment;
* ``lc`` erodes ``sigma`` alone as long as the result stays consistent with
  ``alpha``;
* ``ue`` (an extension) uses the ultimate erosion of ``sigma & alpha``;
* ``f`` works with the rank of every world in the stratification around
  ``sigma`` and also covers observations inconsistent with ``sigma``.

All predicates compare model sets modulo ``sigma``: only ``sigma & gamma``
and ``sigma & alpha`` matter.  An explanation must be consistent with
``sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    EmptyExplanans,
    EmptyInput,
    EmptyObservation,
    InconsistentExplanans,
    InconsistentObservation,
)
from .morphology import (
    Stratification,
    dilation_sequence,
    erosion_sequence,
    last_erosion,
    stratify,
    ultimate_erosion,
)
from .worlds import StructuringElement, World, WorldSet

RELATIONS = ("lneu", "lned", "lc", "ue", "f")


@dataclass(frozen=True)
class TheoryContext:
    sigma: WorldSet
    se: StructuringElement
    strat: Stratification = field(init=False, repr=False, compare=False)
    _cores: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.sigma.is_empty:
            raise EmptyInput("the background theory must be consistent")
        if self.sigma.alphabet != self.se.alphabet:
            raise ValueError("theory and structuring element use different alphabets")
        object.__setattr__(self, "strat", stratify(self.sigma, self.se))
        object.__setattr__(self, "_cores", {})

    def relative(self, ws: WorldSet) -> WorldSet:
        return self.sigma & ws

    def entails(self, x: WorldSet, y: WorldSet) -> bool:
        """``x`` entails ``y`` modulo the theory."""
        return (self.sigma.bits & x.bits & ~y.bits) == 0

    def equivalent(self, x: WorldSet, y: WorldSet) -> bool:
        return (self.sigma.bits & x.bits) == (self.sigma.bits & y.bits)


@dataclass(frozen=True)
class ExplanationResult:
    core: WorldSet
    relation: str
    depth: int | None


def last_consistent_erosion(ctx: TheoryContext, alpha: WorldSet) -> tuple[WorldSet, int]:
    """Deepest erosion of the theory that is still consistent with ``alpha``."""
    if not (ctx.sigma.bits & alpha.bits):
        raise InconsistentObservation("the observation contradicts the background theory")
    sequence = erosion_sequence(ctx.sigma, ctx.se)
    depth = 0
    while depth + 1 < len(sequence) and sequence[depth + 1] & alpha.bits:
        depth += 1
    return WorldSet(alpha.alphabet, sequence[depth]), depth


def central(ctx: TheoryContext, alpha: WorldSet) -> WorldSet:
    """Most central models of ``alpha``; the theory itself if none is reachable."""
    if alpha.is_empty:
        raise EmptyObservation("the observation is inconsistent")
    ranks = ctx.strat.ranks
    best = min((ranks[w] for w in alpha), default=math.inf)
    if best == math.inf:
        return ctx.sigma
    return WorldSet(alpha.alphabet, sum(1 << w for w in alpha if ranks[w] == best))


def _core(ctx: TheoryContext, alpha: WorldSet, relation: str) -> ExplanationResult:
    key = (alpha.bits, relation)
    cached = ctx._cores.get(key)
    if cached is not None:
        return cached
    if relation == "f":
        result = ExplanationResult(central(ctx, alpha), relation, None)
    else:
        base = ctx.relative(alpha)
        if base.is_empty:
            raise InconsistentObservation("the observation contradicts the background theory")
        if relation in ("lneu", "lned"):
            core, depth = last_erosion(base, ctx.se)
            result = ExplanationResult(core, relation, depth)
        elif relation == "lc":
            eroded, depth = last_consistent_erosion(ctx, alpha)
            result = ExplanationResult(eroded & alpha, relation, depth)
        elif relation == "ue":
            result = ExplanationResult(ultimate_erosion(base, ctx.se), relation, None)
        else:
            raise ValueError(f"unknown relation {relation!r}; expected one of {', '.join(RELATIONS)}")
    ctx._cores[key] = result
    return result


def preferred_explanation(ctx: TheoryContext, alpha: WorldSet, relation: str) -> ExplanationResult:
    """Canonical explanation core of ``alpha`` for ``relation``."""
    if alpha.is_empty:
        raise EmptyObservation("the observation is inconsistent")
    return _core(ctx, alpha, relation)


def explains(ctx: TheoryContext, gamma: WorldSet, alpha: WorldSet, relation: str) -> bool:
    if gamma.is_empty:
        raise InconsistentExplanans("an explanation must be consistent")
    if relation == "f":
        return explains_f(ctx, gamma, alpha)
    core = _core(ctx, alpha, relation).core
    restricted = ctx.sigma.bits & gamma.bits
    if not restricted:
        return False
    if relation == "lneu":
        return restricted == core.bits
    return restricted & ~core.bits == 0


def explains_f(ctx: TheoryContext, gamma: WorldSet, alpha: WorldSet) -> bool:
    """``gamma`` entails the central models of ``alpha`` (plain entailment)."""
    if gamma.is_empty:
        raise EmptyExplanans("an explanation must be consistent")
    return gamma <= central(ctx, alpha)


def revise_f(ctx: TheoryContext, alpha: WorldSet) -> WorldSet:
    return central(ctx, alpha)


def explains_with_noise(ctx: TheoryContext, gamma: WorldSet, noise: WorldSet,
                        alpha: WorldSet, relation: str) -> bool:
    """Membership test for ``gamma | noise`` where ``noise`` lies outside the theory."""
    if noise.bits & ctx.sigma.bits:
        raise ValueError("noise must be inconsistent with the background theory")
    return explains(ctx, gamma | noise, alpha, relation)


# ---------------------------------------------------------------------------
# Orders read off the erosions and dilations of the theory


def erosion_leq(ctx: TheoryContext, w1: World, w2: World) -> bool:
    """Every erosion of the theory containing ``w2`` contains ``w1``."""
    return all((level >> w1) & 1 for level in erosion_sequence(ctx.sigma, ctx.se) if (level >> w2) & 1)


def dilation_leq(ctx: TheoryContext, w1: World, w2: World) -> bool:
    return all((level >> w1) & 1 for level in dilation_sequence(ctx.sigma, ctx.se) if (level >> w2) & 1)
