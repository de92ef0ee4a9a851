"""Worlds, model sets and structuring elements.

A world is an ``int`` index (see :mod:`morphlog.formula` for the bit layout).
A :class:`WorldSet` stores its members as one Python integer used as a
``2**N``-bit membership vector, so that union, intersection and complement
are single integer operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InvalidStructuringElement
from .formula import Alphabet, full_mask, position_mask

World = int


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class WorldSet:
    alphabet: Alphabet
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits > full_mask(self.alphabet.size):
            raise ValueError("membership vector does not fit the universe")

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "WorldSet":
        return cls(alphabet, 0)

    @classmethod
    def full(cls, alphabet: Alphabet) -> "WorldSet":
        return cls(alphabet, full_mask(alphabet.size))

    @classmethod
    def of(cls, alphabet: Alphabet, worlds: Iterable[World | str]) -> "WorldSet":
        """Build from world indices or bit strings such as ``"011"``."""
        bits = 0
        for w in worlds:
            index = alphabet.world_from_bits(w) if isinstance(w, str) else int(w)
            if not 0 <= index < alphabet.world_count:
                raise ValueError(f"world {w!r} outside the universe")
            bits |= 1 << index
        return cls(alphabet, bits)

    def _same(self, other: "WorldSet") -> None:
        if other.alphabet != self.alphabet:
            raise ValueError("world sets over different alphabets")

    def __or__(self, other: "WorldSet") -> "WorldSet":
        self._same(other)
        return WorldSet(self.alphabet, self.bits | other.bits)

    def __and__(self, other: "WorldSet") -> "WorldSet":
        self._same(other)
        return WorldSet(self.alphabet, self.bits & other.bits)

    def __sub__(self, other: "WorldSet") -> "WorldSet":
        self._same(other)
        return WorldSet(self.alphabet, self.bits & ~other.bits)

    def __invert__(self) -> "WorldSet":
        return WorldSet(self.alphabet, full_mask(self.alphabet.size) & ~self.bits)

    def __le__(self, other: "WorldSet") -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: "WorldSet") -> bool:
        return self <= other and self.bits != other.bits

    def __ge__(self, other: "WorldSet") -> bool:
        return other <= self

    def __gt__(self, other: "WorldSet") -> bool:
        return other < self

    def __contains__(self, world: object) -> bool:
        return isinstance(world, int) and 0 <= world < self.alphabet.world_count and bool((self.bits >> world) & 1)

    def __iter__(self) -> Iterator[World]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_full(self) -> bool:
        return self.bits == full_mask(self.alphabet.size)

    def bit_strings(self) -> list[str]:
        return [self.alphabet.world_bits(w) for w in self]

    def __repr__(self) -> str:
        return "{" + ",".join(self.bit_strings()) + "}"


def hamming(w1: World, w2: World) -> int:
    return (w1 ^ w2).bit_count()


def dist_to_formula(world: World, ws: WorldSet) -> float:
    """Smallest Hamming distance from ``world`` to a member of ``ws`` (``inf`` if empty)."""
    return min((hamming(world, x) for x in ws), default=math.inf)


def _flip(bits: int, n: int, position: int) -> int:
    """Image of a membership vector under negation of one atom."""
    shift = 1 << position
    high = position_mask(n, position)
    return ((bits & ~high & full_mask(n)) << shift) | ((bits & high) >> shift)


# ---------------------------------------------------------------------------
# Structuring elements


class StructuringElement:
    """Neighborhood map ``w -> B_w``; dilation is ``X -> union of B_x, x in X``."""

    alphabet: Alphabet

    @property
    def kind(self) -> str:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        """Spec string in the command-line syntax."""
        raise NotImplementedError

    @property
    def symmetric(self) -> bool:
        return True

    def dilate_bits(self, bits: int) -> int:
        raise NotImplementedError

    def erode_bits(self, bits: int) -> int:
        """``{w | B_w within X}``; for symmetric elements the dual of dilation."""
        full = full_mask(self.alphabet.size)
        return full & ~self.dilate_bits(full & ~bits)

    def neighborhood_bits(self, world: World) -> int:
        return self.dilate_bits(1 << world)

    def neighborhood(self, world: World) -> WorldSet:
        return WorldSet(self.alphabet, self.neighborhood_bits(world))

    def unit(self) -> "StructuringElement":
        """The elementary step iterated by reconstruction-based operators."""
        return self

    def __str__(self) -> str:
        return self.spec


def _atom_positions(alphabet: Alphabet, atoms: Iterable[str]) -> tuple[int, ...]:
    return tuple(sorted(alphabet.position(alphabet.index(a)) for a in atoms))


@dataclass(frozen=True)
class HammingBall(StructuringElement):
    alphabet: Alphabet
    radius: int = 1

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise InvalidStructuringElement("radius must be nonnegative")

    @property
    def kind(self) -> str:
        return "hamming"

    @property
    def spec(self) -> str:
        return f"hamming:{self.radius}"

    def dilate_bits(self, bits: int) -> int:
        n = self.alphabet.size
        for _ in range(min(self.radius, n)):
            step = bits
            for position in range(n):
                step |= _flip(bits, n, position)
            bits = step
        return bits

    def unit(self) -> StructuringElement:
        return self if self.radius <= 1 else HammingBall(self.alphabet, 1)


@dataclass(frozen=True)
class Restricted(StructuringElement):
    """Hamming ball whose members agree with the center outside ``abducibles``."""

    alphabet: Alphabet
    abducibles: tuple[str, ...]
    radius: int = 1
    _positions: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "abducibles", tuple(self.abducibles))
        if self.radius < 0:
            raise InvalidStructuringElement("radius must be nonnegative")
        if len(set(self.abducibles)) != len(self.abducibles):
            raise InvalidStructuringElement("abducible atoms must be distinct")
        object.__setattr__(self, "_positions", _atom_positions(self.alphabet, self.abducibles))

    @property
    def kind(self) -> str:
        return "restricted"

    @property
    def spec(self) -> str:
        return f"restricted:{','.join(self.abducibles)}:{self.radius}"

    def dilate_bits(self, bits: int) -> int:
        n = self.alphabet.size
        for _ in range(min(self.radius, len(self._positions))):
            step = bits
            for position in self._positions:
                step |= _flip(bits, n, position)
            bits = step
        return bits

    def unit(self) -> StructuringElement:
        return self if self.radius <= 1 else Restricted(self.alphabet, self.abducibles, 1)


@dataclass(frozen=True)
class RestrictedExact2(StructuringElement):
    """Center plus the worlds at distance exactly two differing only on ``abducibles``."""

    alphabet: Alphabet
    abducibles: tuple[str, ...]
    _positions: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "abducibles", tuple(self.abducibles))
        if len(set(self.abducibles)) != len(self.abducibles):
            raise InvalidStructuringElement("abducible atoms must be distinct")
        object.__setattr__(self, "_positions", _atom_positions(self.alphabet, self.abducibles))

    @property
    def kind(self) -> str:
        return "restricted2"

    @property
    def spec(self) -> str:
        return f"restricted2:{','.join(self.abducibles)}"

    def dilate_bits(self, bits: int) -> int:
        n = self.alphabet.size
        result = bits
        positions = self._positions
        for i, p in enumerate(positions):
            once = _flip(bits, n, p)
            for q in positions[i + 1:]:
                result |= _flip(once, n, q)
        return result


@dataclass(frozen=True)
class Explicit(StructuringElement):
    """Arbitrary neighborhood table, one membership vector per world."""

    alphabet: Alphabet
    rows: tuple[int, ...]
    check: bool = field(default=True, compare=False)
    _columns: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.alphabet.world_count:
            raise InvalidStructuringElement(f"expected {self.alphabet.world_count} rows, got {len(rows)}")
        full = full_mask(self.alphabet.size)
        if any(r < 0 or r > full for r in rows):
            raise InvalidStructuringElement("row outside the universe")
        columns = [0] * len(rows)
        for w, row in enumerate(rows):
            for x in iter_bits(row):
                columns[x] |= 1 << w
        object.__setattr__(self, "_columns", tuple(columns))
        if self.check:
            report = validate(self)
            if not report.ok:
                raise InvalidStructuringElement(report.describe(self.alphabet))

    @classmethod
    def from_map(cls, alphabet: Alphabet, table: dict[World, Iterable[World]], check: bool = True) -> "Explicit":
        rows = [0] * alphabet.world_count
        for w, neighbors in table.items():
            for x in neighbors:
                rows[w] |= 1 << x
        return cls(alphabet, tuple(rows), check)

    @property
    def kind(self) -> str:
        return "explicit"

    @property
    def spec(self) -> str:
        return "explicit"

    @property
    def symmetric(self) -> bool:
        return self.rows == self._columns

    def dilate_bits(self, bits: int) -> int:
        result = 0
        for x in iter_bits(bits):
            result |= self.rows[x]
        return result

    def erode_bits(self, bits: int) -> int:
        full = full_mask(self.alphabet.size)
        hit = 0
        for y in iter_bits(full & ~bits):
            hit |= self._columns[y]
        return full & ~hit

    def neighborhood_bits(self, world: World) -> int:
        return self.rows[world]


@dataclass(frozen=True)
class ValidationReport:
    symmetry: tuple[tuple[World, World], ...]
    reflexivity: tuple[World, ...]

    @property
    def ok(self) -> bool:
        return not self.symmetry and not self.reflexivity

    def describe(self, alphabet: Alphabet) -> str:
        parts = []
        if self.symmetry:
            w, x = self.symmetry[0]
            parts.append(f"not symmetric: {alphabet.world_bits(x)} is a neighbor of "
                         f"{alphabet.world_bits(w)} but not conversely")
        if self.reflexivity:
            parts.append(f"not reflexive at {alphabet.world_bits(self.reflexivity[0])}")
        return "; ".join(parts) or "ok"


def validate(se: StructuringElement) -> ValidationReport:
    """Exhaustive symmetry and reflexivity check over all worlds."""
    rows = [se.neighborhood_bits(w) for w in range(se.alphabet.world_count)]
    asym = tuple((w, x) for w, row in enumerate(rows) for x in iter_bits(row) if not (rows[x] >> w) & 1)
    irreflexive = tuple(w for w, row in enumerate(rows) if not (row >> w) & 1)
    return ValidationReport(asym, irreflexive)


def read_explicit(path: str | Path, alphabet: Alphabet) -> Explicit:
    """Read ``world_bits: neighbor_bits,...`` lines; every world needs a row."""
    table: dict[World, list[World]] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise InvalidStructuringElement(f"{path}:{lineno}: missing ':'")
        try:
            w = alphabet.world_from_bits(head)
            neighbors = [alphabet.world_from_bits(t) for t in tail.split(",") if t.strip()]
        except Exception as exc:
            raise InvalidStructuringElement(f"{path}:{lineno}: {exc}") from None
        if w in table:
            raise InvalidStructuringElement(f"{path}:{lineno}: duplicate row for {head.strip()}")
        table[w] = neighbors
    missing = [w for w in range(alphabet.world_count) if w not in table]
    if missing:
        raise InvalidStructuringElement(f"{path}: no row for world {alphabet.world_bits(missing[0])}")
    return Explicit.from_map(alphabet, table)


def parse_se(spec: str, alphabet: Alphabet) -> StructuringElement:
    """Build a structuring element from ``hamming:<r>``, ``restricted:<atoms>:<r>``,
    ``restricted2:<atoms>`` or ``explicit:<path>``."""
    kind, _, rest = spec.strip().partition(":")
    try:
        if kind == "hamming":
            return HammingBall(alphabet, int(rest or "1"))
        if kind == "restricted":
            atoms, _, radius = rest.rpartition(":")
            if not atoms:
                atoms, radius = radius, "1"
            return Restricted(alphabet, tuple(a.strip() for a in atoms.split(",") if a.strip()), int(radius))
        if kind == "restricted2":
            return RestrictedExact2(alphabet, tuple(a.strip() for a in rest.split(",") if a.strip()))
        if kind == "explicit":
            return read_explicit(rest, alphabet)
    except ValueError as exc:
        raise InvalidStructuringElement(f"bad structuring element {spec!r}: {exc}") from None
    except OSError as exc:
        raise InvalidStructuringElement(f"cannot read {rest!r}: {exc.strerror}") from None
    raise InvalidStructuringElement(f"unknown structuring element kind {kind!r}")


@lru_cache(maxsize=64)
def standard_elements(alphabet: Alphabet) -> tuple[StructuringElement, ...]:
    """Every shipped element kind instantiated over ``alphabet``.

    Used by exhaustive law checks: all Hamming radii, and restricted variants
    over each nonempty atom subset.
    """
    from itertools import combinations

    found: list[StructuringElement] = [HammingBall(alphabet, r) for r in range(alphabet.size + 1)]
    for k in range(1, alphabet.size + 1):
        for subset in combinations(alphabet.atoms, k):
            found.append(Restricted(alphabet, subset, 1))
            if k >= 2:
                found.append(Restricted(alphabet, subset, 2))
                found.append(RestrictedExact2(alphabet, subset))
    return tuple(found)
