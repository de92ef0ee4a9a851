"""Revision by dilation: grow the beliefs until they meet the new information."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyBelief
from .morphology import Stratification, dilation_depths, dilation_sequence
from .worlds import StructuringElement, WorldSet


@dataclass(frozen=True)
class RevisionOutcome:
    result: WorldSet
    dilation_depth: int | None  # None when no dilation meets the new information
    limited: bool

    @property
    def unreachable(self) -> bool:
        return self.dilation_depth is None


def revise(phi: WorldSet, psi: WorldSet, se: StructuringElement) -> RevisionOutcome:
    """Smallest dilation of ``phi`` consistent with ``psi``, intersected with ``psi``.

    If the dilations of ``phi`` stabilize without meeting ``psi`` the
    beliefs are kept unchanged and the outcome is flagged as limited.
    """
    if phi.is_empty:
        raise EmptyBelief("cannot revise an inconsistent belief base")
    for depth, bits in enumerate(dilation_sequence(phi, se)):
        if bits & psi.bits:
            return RevisionOutcome(WorldSet(phi.alphabet, bits & psi.bits), depth, False)
    return RevisionOutcome(phi, None, True)


def faithful_order(phi: WorldSet, se: StructuringElement) -> Stratification:
    """Rank of a world: the number of dilations of ``phi`` needed to reach it."""
    if phi.is_empty:
        raise EmptyBelief("cannot order worlds around an inconsistent belief base")
    ranks = dilation_depths(phi, se)
    finite = [r for r in ranks if r != math.inf]
    return Stratification(phi, se, ranks, 0, int(max(finite)))


def revise_via_order(phi: WorldSet, psi: WorldSet, se: StructuringElement) -> WorldSet:
    """Minimal models of ``psi`` for the order around ``phi``; ``phi`` if none is reachable."""
    order = faithful_order(phi, se)
    best = min((order.rank(w) for w in psi), default=math.inf)
    if best == math.inf:
        return phi
    return WorldSet(phi.alphabet, sum(1 << w for w in psi if order.rank(w) == best))
