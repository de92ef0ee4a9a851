"""Propositional formulas: alphabet, syntax tree, parser, printer and normal forms.

Worlds are indexed by integers in ``[0, 2**N)``.  The first atom of the
alphabet is the most significant bit of the index, so that the binary
spelling of a world index lists truth values in atom order
(``"011"`` over ``a, b, c`` means ``a`` false, ``b`` and ``c`` true).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Iterator

from .errors import FormulaSyntaxError, InvalidAlphabet, ScaleExceeded, UnknownAtom

if TYPE_CHECKING:
    from .worlds import WorldSet

MAX_ATOMS = 20
ATOM_PATTERN = re.compile(r"[a-z][a-zA-Z0-9_]*")


# ---------------------------------------------------------------------------
# Alphabet


@dataclass(frozen=True)
class Alphabet:
    atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise InvalidAlphabet("an alphabet needs at least one atom")
        if len(atoms) > MAX_ATOMS:
            raise ScaleExceeded(f"{len(atoms)} atoms requested, at most {MAX_ATOMS} supported")
        for name in atoms:
            if not isinstance(name, str) or not ATOM_PATTERN.fullmatch(name):
                raise InvalidAlphabet(f"invalid atom name {name!r}")
        if len(set(atoms)) != len(atoms):
            raise InvalidAlphabet("atom names must be distinct")

    @classmethod
    def of(cls, spec: str | Iterable[str]) -> "Alphabet":
        """Build from ``"a,b,c"`` or from any iterable of names."""
        if isinstance(spec, str):
            spec = [part.strip() for part in spec.split(",") if part.strip()]
        return cls(tuple(spec))

    @property
    def size(self) -> int:
        return len(self.atoms)

    @property
    def world_count(self) -> int:
        return 1 << len(self.atoms)

    def index(self, name: str) -> int:
        try:
            return self.atoms.index(name)
        except ValueError:
            raise UnknownAtom(name) from None

    def position(self, atom_index: int) -> int:
        """Bit position of an atom inside a world index."""
        return len(self.atoms) - 1 - atom_index

    def world_bits(self, world: int) -> str:
        return format(world, f"0{len(self.atoms)}b")

    def world_from_bits(self, bits: str) -> int:
        bits = bits.strip()
        if len(bits) != len(self.atoms) or set(bits) - {"0", "1"}:
            raise InvalidAlphabet(f"world {bits!r} is not a {len(self.atoms)}-bit string")
        return int(bits, 2)

    def value(self, world: int, atom_index: int) -> bool:
        return bool((world >> self.position(atom_index)) & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        return ",".join(self.atoms)


@lru_cache(maxsize=None)
def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


@lru_cache(maxsize=None)
def position_mask(n: int, position: int) -> int:
    """Membership mask of the worlds whose index has ``position`` set."""
    half = 1 << position
    block = ((1 << half) - 1) << half
    period = 1 << (position + 1)
    return block * (full_mask(n) // ((1 << period) - 1))


def atom_mask(alphabet: Alphabet, atom_index: int) -> int:
    return position_mask(alphabet.size, alphabet.position(atom_index))


# ---------------------------------------------------------------------------
# Syntax tree


class Formula:
    """Base class of formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def __repr__(self) -> str:
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r},{self.right!r})"


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


@dataclass(frozen=True, repr=False)
class _Constant(Formula):
    value: bool

    def __repr__(self) -> str:
        return "Top" if self.value else "Bottom"


TOP = _Constant(True)
BOTTOM = _Constant(False)


def conjoin(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction with constants absorbed; the empty conjunction is ``TOP``."""
    result: Formula | None = None
    for part in parts:
        if part == BOTTOM:
            return BOTTOM
        if part != TOP:
            result = part if result is None else And(result, part)
    return TOP if result is None else result


def disjoin(parts: Iterable[Formula]) -> Formula:
    result: Formula | None = None
    for part in parts:
        if part == TOP:
            return TOP
        if part != BOTTOM:
            result = part if result is None else Or(result, part)
    return BOTTOM if result is None else result


def literal(name: str, positive: bool) -> Formula:
    return Atom(name) if positive else Not(Atom(name))


def _chain(node: Formula, kind: type) -> list[Formula]:
    """Operands of a left-nested chain of ``kind`` nodes, without recursion."""
    operands: list[Formula] = []
    while type(node) is kind:
        operands.append(node.right)  # type: ignore[attr-defined]
        node = node.left  # type: ignore[attr-defined]
    operands.append(node)
    operands.reverse()
    return operands


def atoms_of(f: Formula) -> list[str]:
    """Atom names in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            seen.setdefault(node.name, None)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, _Binary):
            stack.append(node.right)
            stack.append(node.left)
    return list(seen)


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"\s*(?:(<->)|(->)|([&|!()])|([a-z][a-zA-Z0-9_]*)|([TF])(?![a-zA-Z0-9_]))")


@dataclass(frozen=True)
class _Token:
    kind: str  # operator text, "atom", "const" or "end"
    text: str
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            tokens.append(_Token("end", "", pos + 1))
            return tokens
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos + 1,
                                     ("atom", "T", "F", "!", "("))
        start = match.start(match.lastindex)
        if match.group(4):
            tokens.append(_Token("atom", match.group(4), start + 1))
        elif match.group(5):
            tokens.append(_Token("const", match.group(5), start + 1))
        else:
            op = match.group(match.lastindex)
            tokens.append(_Token(op, op, start + 1))
        pos = match.end()


class _Parser:
    _LEVELS = (("<->", Iff), ("->", Implies), ("|", Or), ("&", And))

    def __init__(self, tokens: list[_Token], alphabet: Alphabet | None):
        self.tokens = tokens
        self.pos = 0
        self.alphabet = alphabet

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> Formula:
        node = self.binary(0)
        token = self.peek()
        if token.kind != "end":
            expected = tuple(op for op, _ in self._LEVELS) + ("end of input",)
            raise FormulaSyntaxError(f"unexpected {token.text!r}", token.column, expected)
        return node

    def binary(self, level: int) -> Formula:
        if level == len(self._LEVELS):
            return self.unary()
        op, node_type = self._LEVELS[level]
        operands = [self.binary(level + 1)]
        while self.peek().kind == op:
            self.advance()
            operands.append(self.binary(level + 1))
        if node_type is Implies:
            # implication associates to the right
            result = operands[-1]
            for operand in reversed(operands[:-1]):
                result = Implies(operand, result)
            return result
        result = operands[0]
        for operand in operands[1:]:
            result = node_type(result, operand)
        return result

    def unary(self) -> Formula:
        token = self.advance()
        if token.kind == "!":
            return Not(self.unary())
        if token.kind == "(":
            inner = self.binary(0)
            closing = self.advance()
            if closing.kind != ")":
                raise FormulaSyntaxError("unbalanced parenthesis", closing.column,
                                         ("&", "|", "->", "<->", ")"))
            return inner
        if token.kind == "atom":
            if self.alphabet is not None and token.text not in self.alphabet.atoms:
                raise UnknownAtom(token.text)
            return Atom(token.text)
        if token.kind == "const":
            return TOP if token.text == "T" else BOTTOM
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise FormulaSyntaxError(f"unexpected {found}", token.column, ("atom", "T", "F", "!", "("))


def parse(text: str, alphabet: Alphabet | None = None) -> Formula:
    """Parse ``text``; atoms must belong to ``alphabet`` when one is given."""
    return _Parser(_tokenize(text), alphabet).parse()


def parse_with_alphabet(text: str, alphabet: Alphabet | None = None) -> tuple[Formula, Alphabet]:
    """Parse and return the alphabet, inferring it from first occurrences if absent."""
    f = parse(text, alphabet)
    if alphabet is None:
        names = atoms_of(f)
        alphabet = Alphabet(tuple(names) if names else ("a",))
    return f, alphabet


# ---------------------------------------------------------------------------
# Printer

_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def render(f: Formula) -> str:
    """Concrete syntax accepted by ``parse``, with minimal parentheses."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, _Constant):
        return "T" if f.value else "F"
    if isinstance(f, Not):
        inner = render(f.arg)
        return "!" + (f"({inner})" if isinstance(f.arg, _Binary) else inner)
    kind = type(f)
    prec = _PRECEDENCE[kind]
    if kind in (And, Or):
        parts = []
        for operand in _chain(f, kind):
            text = render(operand)
            if isinstance(operand, _Binary) and (_PRECEDENCE[type(operand)] <= prec or kind is Or):
                text = f"({text})"
            parts.append(text)
        return f" {_SYMBOL[kind]} ".join(parts)
    left, right = render(f.left), render(f.right)  # type: ignore[attr-defined]
    if isinstance(f.left, _Binary) and _PRECEDENCE[type(f.left)] <= prec:  # type: ignore[attr-defined]
        left = f"({left})"
    if isinstance(f.right, _Binary) and _PRECEDENCE[type(f.right)] <= prec:  # type: ignore[attr-defined]
        right = f"({right})"
    return f"{left} {_SYMBOL[kind]} {right}"


# ---------------------------------------------------------------------------
# Semantics


def model_bits(f: Formula, alphabet: Alphabet) -> int:
    """Membership mask of the models of ``f`` (bit ``w`` set iff ``w |= f``)."""
    full = full_mask(alphabet.size)

    def evaluate(node: Formula) -> int:
        if isinstance(node, Atom):
            return atom_mask(alphabet, alphabet.index(node.name))
        if isinstance(node, _Constant):
            return full if node.value else 0
        if isinstance(node, Not):
            return full & ~evaluate(node.arg)
        kind = type(node)
        if kind is And:
            result = full
            for operand in _chain(node, And):
                result &= evaluate(operand)
            return result
        if kind is Or:
            result = 0
            for operand in _chain(node, Or):
                result |= evaluate(operand)
            return result
        left, right = evaluate(node.left), evaluate(node.right)  # type: ignore[attr-defined]
        if kind is Implies:
            return (full & ~left) | right
        return full & ~(left ^ right)

    return evaluate(f)


def models(f: Formula, alphabet: Alphabet) -> "WorldSet":
    from .worlds import WorldSet

    return WorldSet(alphabet, model_bits(f, alphabet))


def _term_formula(alphabet: Alphabet, value: int, free: int) -> Formula:
    lits = []
    for i, name in enumerate(alphabet.atoms):
        position = alphabet.position(i)
        if not (free >> position) & 1:
            lits.append(literal(name, bool((value >> position) & 1)))
    return conjoin(lits)


def from_models(ws: "WorldSet", minimize_result: bool = False) -> Formula:
    """Full minterm DNF of a model set, or a minimized DNF on request."""
    if minimize_result:
        return minimize(ws)
    if ws.bits == 0:
        return BOTTOM
    if ws.bits == full_mask(ws.alphabet.size):
        return TOP
    return disjoin(_term_formula(ws.alphabet, w, 0) for w in ws)


def _common_alphabet(f: Formula, g: Formula, alphabet: Alphabet | None) -> Alphabet:
    if alphabet is not None:
        return alphabet
    names = list(dict.fromkeys(atoms_of(f) + atoms_of(g)))
    return Alphabet(tuple(names) if names else ("a",))


def equivalent(f: Formula, g: Formula, alphabet: Alphabet | None = None) -> bool:
    alphabet = _common_alphabet(f, g, alphabet)
    return model_bits(f, alphabet) == model_bits(g, alphabet)


def entails(f: Formula, g: Formula, alphabet: Alphabet | None = None) -> bool:
    alphabet = _common_alphabet(f, g, alphabet)
    return model_bits(f, alphabet) & ~model_bits(g, alphabet) == 0


# ---------------------------------------------------------------------------
# Minimization (prime implicants with a deterministic greedy cover)


def prime_implicants(on_bits: int, n: int) -> list[tuple[int, int]]:
    """Prime implicants of a mask over ``n`` variables as ``(value, free)`` pairs.

    ``free`` marks the index bits the implicant does not constrain; ``value``
    is zero on those bits.
    """
    current: dict[int, set[int]] = {0: {w for w in range(1 << n) if (on_bits >> w) & 1}}
    primes: list[tuple[int, int]] = []
    while current:
        following: dict[int, set[int]] = {}
        for free, values in current.items():
            used: set[int] = set()
            for value in values:
                for position in range(n):
                    bit = 1 << position
                    if free & bit or value & bit:
                        continue
                    partner = value | bit
                    if partner in values:
                        used.add(value)
                        used.add(partner)
                        following.setdefault(free | bit, set()).add(value)
            primes.extend((value, free) for value in values if value not in used)
        current = following
    return sorted(primes, key=lambda p: (-bin(p[1]).count("1"), p[1], p[0]))


def _implicant_mask(value: int, free: int, n: int) -> int:
    mask = full_mask(n)
    for position in range(n):
        if not (free >> position) & 1:
            m = position_mask(n, position)
            mask &= m if (value >> position) & 1 else ~m
    return mask & full_mask(n)


def minimal_cover(on_bits: int, n: int, dont_care: int = 0) -> list[tuple[int, int]]:
    """Essential primes plus a deterministic greedy completion."""
    on_bits &= ~dont_care
    if on_bits == 0:
        return []
    primes = prime_implicants(on_bits | dont_care, n)
    masks = [_implicant_mask(v, f, n) for v, f in primes]
    chosen: list[int] = []
    uncovered = on_bits
    remaining = on_bits
    while remaining:
        low = remaining & -remaining
        covering = [i for i, m in enumerate(masks) if m & low]
        if len(covering) == 1 and covering[0] not in chosen:
            chosen.append(covering[0])
            uncovered &= ~masks[covering[0]]
        remaining ^= low
    while uncovered:
        best = max(range(len(primes)),
                   key=lambda i: ((masks[i] & uncovered).bit_count(), primes[i][1].bit_count(), -i))
        chosen.append(best)
        uncovered &= ~masks[best]
    chosen.sort()
    return [primes[i] for i in chosen]


def minimize(ws: "WorldSet", dont_care: "WorldSet | None" = None) -> Formula:
    """A small DNF whose models agree with ``ws`` outside ``dont_care``."""
    n = ws.alphabet.size
    dc = dont_care.bits if dont_care is not None else 0
    cover = minimal_cover(ws.bits, n, dc)
    if not cover:
        return BOTTOM
    terms = [_term_formula(ws.alphabet, value, free) for value, free in cover]
    if any(t is TOP for t in terms):
        return TOP
    return disjoin(terms)


# ---------------------------------------------------------------------------
# Normal forms

Literal = tuple[int, bool]


def _clause_key(clause: tuple[Literal, ...]) -> tuple:
    return (len(clause), clause)


def _normalize(clauses: Iterable[Iterable[Literal]]) -> tuple[tuple[Literal, ...], ...]:
    """Dedupe literals, drop complementary clauses, remove subsumed ones."""
    cleaned: set[frozenset[Literal]] = set()
    for clause in clauses:
        lits = frozenset(clause)
        if len({a for a, _ in lits}) == len(lits):
            cleaned.add(lits)
    minimal = [c for c in cleaned if not any(o < c for o in cleaned)]
    return tuple(sorted((tuple(sorted(c)) for c in minimal), key=_clause_key))


@dataclass(frozen=True)
class DnfForm:
    """Disjunction of terms; each term a conjunction of ``(atom index, polarity)``."""

    alphabet: Alphabet
    clauses: tuple[tuple[Literal, ...], ...]

    @classmethod
    def build(cls, alphabet: Alphabet, terms: Iterable[Iterable[Literal]], prune: bool = True) -> "DnfForm":
        if prune:
            return cls(alphabet, _normalize(terms))
        kept = []
        for term in terms:
            lits = tuple(sorted(set(term)))
            if len({a for a, _ in lits}) == len(lits):
                kept.append(lits)
        return cls(alphabet, tuple(dict.fromkeys(kept)))

    def to_formula(self) -> Formula:
        names = self.alphabet.atoms
        return disjoin(conjoin(literal(names[a], p) for a, p in term) for term in self.clauses)

    def model_bits(self) -> int:
        n, result = self.alphabet.size, 0
        for term in self.clauses:
            mask = full_mask(n)
            for a, p in term:
                m = atom_mask(self.alphabet, a)
                mask &= m if p else ~m
            result |= mask & full_mask(n)
        return result

    def models(self) -> "WorldSet":
        from .worlds import WorldSet

        return WorldSet(self.alphabet, self.model_bits())

    def __str__(self) -> str:
        return render(self.to_formula())


@dataclass(frozen=True)
class CnfForm:
    """Conjunction of clauses; each clause a disjunction of literals."""

    alphabet: Alphabet
    clauses: tuple[tuple[Literal, ...], ...]

    @classmethod
    def build(cls, alphabet: Alphabet, clauses: Iterable[Iterable[Literal]], prune: bool = True) -> "CnfForm":
        dual = DnfForm.build(alphabet, clauses, prune)
        return cls(alphabet, dual.clauses)

    def to_formula(self) -> Formula:
        names = self.alphabet.atoms
        return conjoin(disjoin(literal(names[a], p) for a, p in clause) for clause in self.clauses)

    def model_bits(self) -> int:
        negated = DnfForm(self.alphabet, tuple(tuple((a, not p) for a, p in c) for c in self.clauses))
        return full_mask(self.alphabet.size) & ~negated.model_bits()

    def models(self) -> "WorldSet":
        from .worlds import WorldSet

        return WorldSet(self.alphabet, self.model_bits())

    def __str__(self) -> str:
        return render(self.to_formula())


def _dnf_terms(f: Formula, alphabet: Alphabet, positive: bool) -> set[frozenset[Literal]]:
    """DNF terms of ``f`` (or of its negation when ``positive`` is false)."""
    if isinstance(f, Atom):
        return {frozenset({(alphabet.index(f.name), positive)})}
    if isinstance(f, _Constant):
        return {frozenset()} if f.value == positive else set()
    if isinstance(f, Not):
        return _dnf_terms(f.arg, alphabet, not positive)
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    elif isinstance(f, Iff):
        f = Or(And(f.left, f.right), And(Not(f.left), Not(f.right)))
    conjunctive = isinstance(f, And) == positive
    left = _dnf_terms(f.left, alphabet, positive)  # type: ignore[attr-defined]
    right = _dnf_terms(f.right, alphabet, positive)  # type: ignore[attr-defined]
    if not conjunctive:
        return _absorb(left | right)
    product = set()
    for x in left:
        for y in right:
            term = x | y
            if len({a for a, _ in term}) == len(term):
                product.add(term)
    return _absorb(product)


def _absorb(terms: set[frozenset[Literal]]) -> set[frozenset[Literal]]:
    return {t for t in terms if not any(o < t for o in terms)}


def to_dnf(f: Formula, alphabet: Alphabet | None = None) -> DnfForm:
    alphabet = alphabet or _common_alphabet(f, f, None)
    return DnfForm.build(alphabet, _dnf_terms(f, alphabet, True))


def to_cnf(f: Formula, alphabet: Alphabet | None = None) -> CnfForm:
    alphabet = alphabet or _common_alphabet(f, f, None)
    negated_terms = _dnf_terms(f, alphabet, False)
    return CnfForm.build(alphabet, ([(a, not p) for a, p in term] for term in negated_terms))
