"""Morphological operators on model sets and the ranking they induce.

Every operator takes a :class:`~morphlog.worlds.WorldSet` and a structuring
element and returns a new set.  Iterated operators stop as soon as a value
repeats, reporting the first index at which the repeated value appeared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import EmptyInput
from .worlds import StructuringElement, World, WorldSet, iter_bits


def _check(ws: WorldSet, se: StructuringElement) -> None:
    if ws.alphabet != se.alphabet:
        raise ValueError("model set and structuring element use different alphabets")


def dilate(ws: WorldSet, se: StructuringElement) -> WorldSet:
    _check(ws, se)
    return WorldSet(ws.alphabet, se.dilate_bits(ws.bits))


def erode(ws: WorldSet, se: StructuringElement) -> WorldSet:
    _check(ws, se)
    return WorldSet(ws.alphabet, se.erode_bits(ws.bits))


def iterate(ws: WorldSet, se: StructuringElement, n: int, mode: str = "dilate") -> WorldSet:
    """``n``-fold dilation or erosion; ``n = 0`` is the identity."""
    if n < 0:
        raise ValueError("depth must be nonnegative")
    if mode not in ("dilate", "erode"):
        raise ValueError(f"unknown mode {mode!r}")
    _check(ws, se)
    step = se.dilate_bits if mode == "dilate" else se.erode_bits
    bits = ws.bits
    for _ in range(n):
        following = step(bits)
        if following == bits:
            break
        bits = following
    return WorldSet(ws.alphabet, bits)


def conditional_dilate(ws: WorldSet, cond: WorldSet, se: StructuringElement, n: int) -> WorldSet:
    """Start from ``ws & cond``, then ``n`` rounds of dilate-and-intersect."""
    _check(ws, se)
    bits = ws.bits & cond.bits
    for _ in range(n):
        bits = se.dilate_bits(bits) & cond.bits
    return WorldSet(ws.alphabet, bits)


def conditional_erode(ws: WorldSet, cond: WorldSet, se: StructuringElement, n: int) -> WorldSet:
    """Start from ``ws | cond``, then ``n`` rounds of erode-and-unite."""
    _check(ws, se)
    bits = ws.bits | cond.bits
    for _ in range(n):
        bits = se.erode_bits(bits) | cond.bits
    return WorldSet(ws.alphabet, bits)


def _reconstruct_bits(marker: int, mask: int, se: StructuringElement) -> int:
    bits = marker & mask
    while True:
        grown = se.dilate_bits(bits) & mask
        if grown == bits:
            return bits
        bits = grown


def reconstruct(marker: WorldSet, mask: WorldSet, se: StructuringElement) -> WorldSet:
    """Conditional dilation of ``marker`` inside ``mask`` up to its fixed point."""
    _check(marker, se)
    return WorldSet(mask.alphabet, _reconstruct_bits(marker.bits, mask.bits, se))


def opening(ws: WorldSet, se: StructuringElement) -> WorldSet:
    return dilate(erode(ws, se), se)


def closing(ws: WorldSet, se: StructuringElement) -> WorldSet:
    return erode(dilate(ws, se), se)


def erosion_sequence(ws: WorldSet, se: StructuringElement) -> list[int]:
    """``[e^0, e^1, ...]`` up to the first empty set or first repetition (excluded)."""
    _check(ws, se)
    seen = {ws.bits}
    sequence = [ws.bits]
    while True:
        following = se.erode_bits(sequence[-1])
        if following == 0 or following in seen:
            return sequence
        seen.add(following)
        sequence.append(following)


def dilation_sequence(ws: WorldSet, se: StructuringElement) -> list[int]:
    _check(ws, se)
    seen = {ws.bits}
    sequence = [ws.bits]
    while True:
        following = se.dilate_bits(sequence[-1])
        if following in seen:
            return sequence
        seen.add(following)
        sequence.append(following)


def last_erosion(ws: WorldSet, se: StructuringElement) -> tuple[WorldSet, int]:
    """Last nonempty erosion and its depth."""
    if ws.is_empty:
        raise EmptyInput("the last erosion of an empty set is undefined")
    sequence = erosion_sequence(ws, se)
    return WorldSet(ws.alphabet, sequence[-1]), len(sequence) - 1


def last_dilation(ws: WorldSet, se: StructuringElement) -> tuple[WorldSet, int]:
    """Dilation fixed point and the number of steps needed to reach it."""
    if ws.is_empty:
        raise EmptyInput("the last dilation of an empty set is undefined")
    sequence = dilation_sequence(ws, se)
    return WorldSet(ws.alphabet, sequence[-1]), len(sequence) - 1


def connected_components(ws: WorldSet, se: StructuringElement) -> list[WorldSet]:
    """Components of ``ws`` under the adjacency of the elementary step of ``se``."""
    _check(ws, se)
    step = se.unit()
    parts = []
    remaining = ws.bits
    while remaining:
        seed = remaining & -remaining
        part = _reconstruct_bits(seed, remaining, step)
        parts.append(WorldSet(ws.alphabet, part))
        remaining &= ~part
    return parts


def ultimate_erosion_by_definition(ws: WorldSet, se: StructuringElement) -> WorldSet:
    """Union of the residues ``e^n minus R(e^{n+1} | e^n)``."""
    _check(ws, se)
    step = se.unit()
    result = 0
    if ws.is_empty:
        return WorldSet(ws.alphabet, 0)
    for current in erosion_sequence(ws, step):
        following = step.erode_bits(current)
        result |= current & ~_reconstruct_bits(following, current, step)
    return WorldSet(ws.alphabet, result)


def ultimate_erosion(ws: WorldSet, se: StructuringElement) -> WorldSet:
    """Recursive computation component by component.

    A component that its erosion leaves unchanged contributes nothing,
    which is what the residue formula gives for a fixed point.
    """
    _check(ws, se)
    step = se.unit()

    def recurse(bits: int) -> int:
        parts = connected_components(WorldSet(ws.alphabet, bits), step)
        if len(parts) > 1:
            result = 0
            for part in parts:
                result |= recurse(part.bits)
            return result
        if not parts:
            return 0
        eroded = step.erode_bits(bits)
        if eroded == 0:
            return bits
        if eroded == bits:
            return 0
        return recurse(eroded)

    return WorldSet(ws.alphabet, recurse(ws.bits))


def skeleton(ws: WorldSet, se: StructuringElement) -> WorldSet:
    """Union over successive erosions of the part each opening removes."""
    _check(ws, se)
    step = se.unit()
    result = 0
    current = ws.bits
    seen = set()
    while current and current not in seen:
        seen.add(current)
        result |= current & ~step.dilate_bits(step.erode_bits(current))
        current = step.erode_bits(current)
    return WorldSet(ws.alphabet, result)


def boundaries(ws: WorldSet, se: StructuringElement) -> tuple[WorldSet, WorldSet]:
    """(external, internal) boundary: dilation minus the set, set minus its erosion."""
    return dilate(ws, se) - ws, ws - erode(ws, se)


# ---------------------------------------------------------------------------
# Distances


@lru_cache(maxsize=4096)
def _depths(bits: int, se: StructuringElement) -> tuple[float, ...]:
    count = se.alphabet.world_count
    depths: list[float] = [math.inf] * count
    reached = 0
    depth = 0
    frontier = bits
    while frontier & ~reached:
        for w in iter_bits(frontier & ~reached):
            depths[w] = depth
        reached |= frontier
        frontier = se.dilate_bits(reached)
        depth += 1
    return tuple(depths)


def dilation_depths(ws: WorldSet, se: StructuringElement) -> tuple[float, ...]:
    """For each world, the least ``n`` with the world in the ``n``-th dilation (``inf`` if none)."""
    _check(ws, se)
    return _depths(ws.bits, se)


def min_distance(ws1: WorldSet, ws2: WorldSet, se: StructuringElement) -> float:
    """Least ``n`` such that the ``n``-th dilation of ``ws1`` meets ``ws2``."""
    depths = dilation_depths(ws1, se)
    return min((depths[w] for w in ws2), default=math.inf)


def hausdorff(ws1: WorldSet, ws2: WorldSet, se: StructuringElement) -> float:
    """Least ``n`` such that each set lies in the ``n``-th dilation of the other."""
    if ws1.is_empty and ws2.is_empty:
        return 0
    d12 = dilation_depths(ws1, se)
    d21 = dilation_depths(ws2, se)
    return max(max((d12[w] for w in ws2), default=0), max((d21[w] for w in ws1), default=0))


# ---------------------------------------------------------------------------
# Morphological ordering


@dataclass(frozen=True)
class Stratification:
    """Rank of every world: erosion levels of ``sigma`` first, then dilation levels."""

    sigma: WorldSet
    se: StructuringElement
    ranks: tuple[float, ...]
    m: int
    n: int

    def rank(self, world: World) -> float:
        return self.ranks[world]

    def level(self, k: float) -> WorldSet:
        """Worlds of rank at most ``k``."""
        return WorldSet(self.sigma.alphabet, sum(1 << w for w, r in enumerate(self.ranks) if r <= k))

    def leq(self, w1: World, w2: World) -> bool:
        return self.ranks[w1] <= self.ranks[w2]

    def minimal(self, ws: WorldSet) -> WorldSet:
        """Members of ``ws`` of least rank."""
        best = min((self.ranks[w] for w in ws), default=None)
        if best is None:
            return WorldSet(ws.alphabet, 0)
        return WorldSet(ws.alphabet, sum(1 << w for w in ws if self.ranks[w] == best))

    def table(self) -> dict[float, list[str]]:
        grouped: dict[float, list[str]] = {}
        for w, r in enumerate(self.ranks):
            grouped.setdefault(r, []).append(self.sigma.alphabet.world_bits(w))
        return dict(sorted(grouped.items()))


def stratify(sigma: WorldSet, se: StructuringElement) -> Stratification:
    if sigma.is_empty:
        raise EmptyInput("cannot stratify around an empty set")
    erosions = erosion_sequence(sigma, se)
    dilations = dilation_sequence(sigma, se)
    m, n = len(erosions) - 1, len(dilations) - 1
    levels = list(reversed(erosions)) + dilations[1:]
    ranks: list[float] = [math.inf] * sigma.alphabet.world_count
    for i, level in enumerate(levels):
        for w in iter_bits(level):
            if ranks[w] == math.inf:
                ranks[w] = i
    return Stratification(sigma, se, tuple(ranks), m, n)
