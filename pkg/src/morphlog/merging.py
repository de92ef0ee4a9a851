"""Merging of belief profiles under integrity constraints.

Each world is scored by aggregating its dilation distances to the profile
members; the result is the set of best-scored models of the constraint.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyBelief, EmptyConstraint, EmptyProfile
from .formula import full_mask
from .morphology import dilation_depths, iterate, last_dilation
from .worlds import StructuringElement, World, WorldSet, iter_bits

AGGREGATIONS = ("max", "sum", "gmax")


@dataclass(frozen=True)
class Profile:
    """Ordered multiset of belief bases."""

    members: tuple[WorldSet, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise EmptyProfile("a profile needs at least one belief base")
        alphabet = self.members[0].alphabet
        for i, member in enumerate(self.members):
            if member.alphabet != alphabet:
                raise ValueError("profile members use different alphabets")
            if member.is_empty:
                raise EmptyBelief(f"profile member {i + 1} is inconsistent")

    @property
    def alphabet(self):
        return self.members[0].alphabet

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __add__(self, other: "Profile") -> "Profile":
        """Multiset union."""
        return Profile(self.members + other.members)

    def conjunction(self) -> WorldSet:
        bits = full_mask(self.alphabet.size)
        for member in self.members:
            bits &= member.bits
        return WorldSet(self.alphabet, bits)

    def equivalent(self, other: "Profile") -> bool:
        return sorted(m.bits for m in self.members) == sorted(m.bits for m in other.members)


Score = float | tuple[float, ...]


def aggregate(distances: Sequence[float], agg: str) -> Score:
    if agg == "max":
        return max(distances)
    if agg == "sum":
        return sum(distances)
    if agg == "gmax":
        return tuple(sorted(distances, reverse=True))
    raise ValueError(f"unknown aggregation {agg!r}; expected one of {', '.join(AGGREGATIONS)}")


def _finite(score: Score) -> bool:
    return all(x != math.inf for x in score) if isinstance(score, tuple) else score != math.inf


@dataclass(frozen=True)
class MergeOutcome:
    result: WorldSet
    per_world_scores: tuple[Score, ...]
    aggregation: str
    unreachable: bool = False

    def score(self, world: World) -> Score:
        return self.per_world_scores[world]


def merge(profile: Profile, mu: WorldSet, agg: str, se: StructuringElement) -> MergeOutcome:
    """Models of ``mu`` whose aggregated distance to the profile is least."""
    if agg not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {agg!r}; expected one of {', '.join(AGGREGATIONS)}")
    if mu.is_empty:
        raise EmptyConstraint("the integrity constraint is inconsistent")
    depth_maps = [dilation_depths(member, se) for member in profile]
    scores = tuple(aggregate([d[w] for d in depth_maps], agg) for w in range(mu.alphabet.world_count))
    candidates = [w for w in iter_bits(mu.bits) if _finite(scores[w])]
    if not candidates:
        return MergeOutcome(WorldSet(mu.alphabet, 0), scores, agg, unreachable=True)
    best = min(scores[w] for w in candidates)
    bits = sum(1 << w for w in candidates if scores[w] == best)
    return MergeOutcome(WorldSet(mu.alphabet, bits), scores, agg)


def merge_via_dilation_tuples(profile: Profile, mu: WorldSet, agg: str, se: StructuringElement) -> WorldSet:
    """Union of the conjunctions of dilations over the consistent depth tuples
    that are minimal for the aggregation (a common depth for ``max``)."""
    if mu.is_empty:
        raise EmptyConstraint("the integrity constraint is inconsistent")
    bounds = [last_dilation(member, se)[1] for member in profile]
    levels = [[iterate(member, se, d).bits for d in range(bound + 1)]
              for member, bound in zip(profile, bounds)]
    if agg == "max":
        tuples: Iterable[tuple[int, ...]] = (
            tuple(min(n, b) for b in bounds) for n in range(max(bounds) + 1))
    else:
        tuples = itertools.product(*(range(b + 1) for b in bounds))
    best: Score | None = None
    result = 0
    for depths in tuples:
        bits = mu.bits
        for d, level in zip(depths, levels):
            bits &= level[d]
        if not bits:
            continue
        score = max(depths) if agg == "max" else aggregate(depths, agg)
        if best is None or score < best:
            best, result = score, bits
        elif score == best:
            result |= bits
    return WorldSet(mu.alphabet, result)


# ---------------------------------------------------------------------------
# The symmetry property of a dilation


@dataclass(frozen=True)
class SymReport:
    passed: bool
    mode: str
    checked: int
    witness: tuple[WorldSet, WorldSet, int] | None = None


def _meeting_depth(depths: Sequence[float], bits: int) -> float:
    return min((depths[w] for w in iter_bits(bits)), default=math.inf)


def _pairs_exhaustive(count: int) -> Iterable[tuple[int, int]]:
    full = (1 << count) - 1
    return itertools.product(range(1, full + 1), repeat=2)


def check_sym(se: StructuringElement, samples: int = 2000, seed: int = 0) -> SymReport:
    """Whether ``dilate^n(X)`` meets ``Y`` exactly when ``dilate^n(Y)`` meets ``X``.

    Exhaustive over pairs of nonempty sets when there are at most three
    atoms, otherwise over ``samples`` random pairs; depths up to ``2N``.
    """
    alphabet = se.alphabet
    count = alphabet.world_count
    cap = 2 * alphabet.size
    if alphabet.size <= 3:
        pairs: Iterable[tuple[int, int]] = _pairs_exhaustive(count)
        mode = "exhaustive"
    else:
        rng = random.Random(seed)
        full = (1 << count) - 1
        pairs = [(rng.randint(1, full), rng.randint(1, full)) for _ in range(samples)]
        mode = "sampled"
    depths: dict[int, tuple[float, ...]] = {}
    checked = 0
    for x, y in pairs:
        checked += 1
        if x not in depths:
            depths[x] = dilation_depths(WorldSet(alphabet, x), se)
        if y not in depths:
            depths[y] = dilation_depths(WorldSet(alphabet, y), se)
        forward = min(_meeting_depth(depths[x], y), cap + 1)
        backward = min(_meeting_depth(depths[y], x), cap + 1)
        if forward != backward:
            n = int(min(forward, backward))
            first, second = (x, y) if forward < backward else (y, x)
            return SymReport(False, mode, checked,
                             (WorldSet(alphabet, first), WorldSet(alphabet, second), n))
    return SymReport(True, mode, checked)
