"""Syntactic dilation and erosion on normal forms, with the unit Hamming ball.

Dilating a consistent term by one step yields the disjunction of the terms
obtained by dropping one literal; eroding a clause is the dual.  Both
operations distribute over the outer connective, so a DNF can be dilated
and a CNF eroded without ever enumerating models.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

from .errors import ScaleExceeded, SharedVariables
from .formula import (
    Alphabet,
    CnfForm,
    DnfForm,
    Formula,
    Literal,
    atoms_of,
    conjoin,
    disjoin,
    model_bits,
    to_dnf,
)
from .morphology import erode
from .worlds import HammingBall, WorldSet

Term = tuple[Literal, ...]

PRIME_IMPLICATE_LIMIT = 6


def _drop_one(groups: Sequence[Term]) -> list[Term]:
    """Every group with one literal removed; a literal-free group stays as is."""
    out: list[Term] = []
    for group in groups:
        if not group:
            out.append(group)
            continue
        for j in range(len(group)):
            out.append(group[:j] + group[j + 1:])
    return out


def dilate_dnf(f: DnfForm, k: int = 1, prune: bool = True) -> DnfForm:
    """``k`` unit dilations of a DNF by literal dropping.

    With ``prune`` the result is deduplicated and subsumed terms are removed
    after every step; without it only duplicates are removed.
    """
    if k < 0:
        raise ValueError("size must be nonnegative")
    for _ in range(k):
        f = DnfForm.build(f.alphabet, _drop_one(f.clauses), prune)
    return f


def erode_cnf(f: CnfForm, k: int = 1, prune: bool = True) -> CnfForm:
    """``k`` unit erosions of a CNF; an emptied clause stands for falsity."""
    if k < 0:
        raise ValueError("size must be nonnegative")
    for _ in range(k):
        f = CnfForm.build(f.alphabet, _drop_one(f.clauses), prune)
    return f


def _unit_dilation_formula(f: Formula, alphabet: Alphabet) -> Formula:
    return dilate_dnf(to_dnf(f, alphabet), 1).to_formula()


def dilate_vardisjoint(parts: Sequence[Formula], alphabet: Alphabet | None = None) -> Formula:
    """Unit dilation of a conjunction of variable-disjoint parts.

    Exactly one part is dilated in each disjunct, the others are kept.
    """
    variables = [set(atoms_of(p)) for p in parts]
    for i, j in combinations(range(len(parts)), 2):
        shared = variables[i] & variables[j]
        if shared:
            raise SharedVariables(f"parts {i} and {j} share {', '.join(sorted(shared))}")
    if alphabet is None:
        names = list(dict.fromkeys(name for p in parts for name in atoms_of(p)))
        alphabet = Alphabet(tuple(names) if names else ("a",))
    disjuncts = []
    for j, part in enumerate(parts):
        others = [p for k, p in enumerate(parts) if k != j]
        disjuncts.append(conjoin([_unit_dilation_formula(part, alphabet), *others]))
    return disjoin(disjuncts)


def term_distance(t1: Term, t2: Term) -> int:
    """Number of atoms occurring with opposite polarities in the two terms."""
    polarity = dict(t1)
    return sum(1 for atom, sign in t2 if atom in polarity and polarity[atom] != sign)


@dataclass(frozen=True)
class ComponentGraph:
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, f: DnfForm) -> "ComponentGraph":
        terms = f.clauses
        edges = {(i, j) for i in range(len(terms)) for j in range(len(terms))
                 if term_distance(terms[i], terms[j]) <= 1}
        return cls(tuple(range(len(terms))), frozenset(edges))

    def groups(self) -> list[list[int]]:
        parent = list(self.vertices)

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in sorted(self.edges):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        grouped: dict[int, list[int]] = {}
        for v in self.vertices:
            grouped.setdefault(find(v), []).append(v)
        return list(grouped.values())


def components_dnf(f: DnfForm) -> list[DnfForm]:
    """Split a DNF into groups of terms whose models form connected components."""
    graph = ComponentGraph.of(f)
    return [DnfForm(f.alphabet, tuple(f.clauses[i] for i in group)) for group in graph.groups()]


def erode_via_components(f: DnfForm) -> WorldSet:
    """Unit erosion computed separately on each syntactic component."""
    se = HammingBall(f.alphabet, 1)
    result = WorldSet.empty(f.alphabet)
    for part in components_dnf(f):
        result = result | erode(part.models(), se)
    return result


@lru_cache(maxsize=16)
def _all_clauses(alphabet: Alphabet) -> list[tuple[Term, int]]:
    clauses = []
    for signs in product((None, True, False), repeat=alphabet.size):
        clause = tuple((i, s) for i, s in enumerate(signs) if s is not None)
        if clause:
            clauses.append((clause, CnfForm(alphabet, (clause,)).model_bits()))
    return clauses


def prime_implicates(f: Formula, alphabet: Alphabet | None = None) -> list[Term]:
    """All prime implicates, by enumerating every non-tautological clause."""
    if alphabet is None:
        names = atoms_of(f)
        alphabet = Alphabet(tuple(names) if names else ("a",))
    if alphabet.size > PRIME_IMPLICATE_LIMIT:
        raise ScaleExceeded(f"prime implicate enumeration is limited to {PRIME_IMPLICATE_LIMIT} atoms")
    target = model_bits(f, alphabet)
    implied = [clause for clause, mask in _all_clauses(alphabet) if target & ~mask == 0]
    implied_sets = [frozenset(c) for c in implied]
    primes = [c for c, s in zip(implied, implied_sets) if not any(o < s for o in implied_sets)]
    return sorted(primes, key=lambda c: (len(c), c))
