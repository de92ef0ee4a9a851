"""Finite checkers for the rationality postulates of revision, merging and
explanatory relations.

Every checker enumerates, or samples with a seeded generator, a space of
model-set instances and returns one :class:`PostulateReport` per postulate.
A ``holds`` verdict only says that no violation exists in the declared
space; a ``violated`` verdict always carries replayable witnesses written
as formulas.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

import numpy as np

from .abduction import TheoryContext, explains, preferred_explanation, revise_f
from .errors import InconsistentExplanans, InconsistentObservation, SemanticError
from .formula import Alphabet, from_models, minimize, models, parse
from .merging import AGGREGATIONS, Profile, merge
from .revision import revise
from .worlds import StructuringElement, WorldSet, iter_bits, parse_se

HOLDS = "holds"
VIOLATED = "violated"

REVISION_POSTULATES = ("R1", "R2", "R3", "R4", "R5", "R6", "MS")
MERGING_POSTULATES = ("IC0", "IC1", "IC2", "IC3", "IC4", "IC5", "IC6", "IC6'", "IC7", "IC8")
ABDUCTION_POSTULATES = ("LLE", "RLE", "E-CM", "E-W-CM", "E-C-Cut", "E-R-Cut", "E-W-C-Cut",
                        "E-Reflexivity", "ROR", "RS", "LOR", "E-DR", "E-Con")
TABLE_RELATIONS = ("lneu", "lned", "lc")

# Expected verdicts (holds?) for lneu, lned, lc.
EXPECTED_TABLE: dict[str, tuple[bool, bool, bool]] = {
    "LLE": (True, True, True),
    "RLE": (True, True, True),
    "E-CM": (False, False, True),
    "E-W-CM": (True, True, True),
    "E-C-Cut": (False, False, True),
    "E-R-Cut": (False, False, True),
    "E-W-C-Cut": (True, False, True),
    "E-Reflexivity": (True, False, True),
    "ROR": (True, True, True),
    "RS": (False, True, True),
    "LOR": (False, False, True),
    "E-DR": (False, False, True),
    "E-Con": (True, True, True),
}

MAX_WITNESSES = 3


def formula_text(ws: WorldSet) -> str:
    return str(minimize(ws))


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class PostulateReport:
    postulate: str
    subject: str
    mode: str
    coverage: dict
    verdict: str
    witnesses: tuple[dict, ...] = ()

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_dict(self) -> dict:
        return {
            "postulate": self.postulate,
            "subject": self.subject,
            "mode": self.mode,
            "coverage": self.coverage,
            "verdict": self.verdict,
            "witnesses": list(self.witnesses),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sampled_mode(seed: int, count: int) -> str:
    return f"sampled(seed={seed},count={count})"


class _Tally:
    """Per-postulate counters and the first few witnesses."""

    def __init__(self, names: Sequence[str], limit: int):
        self.names = tuple(names)
        self.instances = dict.fromkeys(self.names, 0)
        self.violations = dict.fromkeys(self.names, 0)
        self.witnesses: dict[str, list[dict]] = {n: [] for n in self.names}
        self.limit = limit

    def wants(self, name: str) -> bool:
        return name in self.instances

    def record(self, name: str, ok: bool, witness: Callable[[], dict]) -> None:
        self.instances[name] += 1
        if not ok:
            self.violations[name] += 1
            if len(self.witnesses[name]) < self.limit:
                self.witnesses[name].append(witness())

    def add(self, name: str, instances: int, violations: int, witnesses: Iterable[dict]) -> None:
        self.instances[name] += instances
        self.violations[name] += violations
        for w in witnesses:
            if len(self.witnesses[name]) < self.limit:
                self.witnesses[name].append(w)

    def found(self, name: str) -> bool:
        return self.violations[name] > 0

    def reports(self, subject: str, mode: str, coverage: dict) -> list[PostulateReport]:
        out = []
        for name in self.names:
            cov = dict(coverage, instances=self.instances[name], violations=self.violations[name])
            verdict = VIOLATED if self.violations[name] else HOLDS
            out.append(PostulateReport(name, subject, mode, cov, verdict, tuple(self.witnesses[name])))
        return out


def _select(names: Sequence[str], wanted: Iterable[str] | None) -> tuple[str, ...]:
    if wanted is None:
        return tuple(names)
    wanted = tuple(wanted)
    unknown = [w for w in wanted if w not in names]
    if unknown:
        raise ValueError(f"unknown postulates: {', '.join(unknown)}")
    return tuple(n for n in names if n in wanted)


# ---------------------------------------------------------------------------
# Revision

RevisionOperator = Callable[[WorldSet, WorldSet], WorldSet]


def revision_operator(se: StructuringElement) -> RevisionOperator:
    """Revision by successive dilations with ``se``."""
    return lambda phi, psi: revise(phi, psi, se).result


def unified_revision_operator(se: StructuringElement) -> RevisionOperator:
    """Revision that returns the most central models of the new information."""
    contexts: dict[int, TheoryContext] = {}

    def op(phi: WorldSet, psi: WorldSet) -> WorldSet:
        ctx = contexts.get(phi.bits)
        if ctx is None:
            ctx = contexts[phi.bits] = TheoryContext(phi, se)
        return revise_f(ctx, psi)

    return op


def _memoized_revision(op: RevisionOperator) -> Callable[[WorldSet, WorldSet], WorldSet]:
    cache: dict[tuple[int, int], WorldSet] = {}

    def call(phi: WorldSet, psi: WorldSet) -> WorldSet:
        key = (phi.bits, psi.bits)
        if key not in cache:
            try:
                cache[key] = op(phi, psi)
            except SemanticError:
                # inconsistent new information: the only admissible outcome is falsity
                cache[key] = WorldSet.empty(phi.alphabet)
        return cache[key]

    return call


def _syntax_roundtrip(ws: WorldSet, minimal: bool) -> WorldSet:
    text = str(minimize(ws)) if minimal else str(from_models(ws))
    return models(parse(text, ws.alphabet), ws.alphabet)


def revision_instances(alphabet: Alphabet, mode: str, samples: int, seed: int
                       ) -> Iterator[tuple[int, int, int, bool]]:
    """``(phi, psi, mu, first_with_pair)`` with nonempty ``phi`` and ``psi``."""
    full = (1 << alphabet.world_count) - 1
    if mode == "exhaustive":
        for phi in range(1, full + 1):
            for psi in range(1, full + 1):
                for mu in range(full + 1):
                    yield phi, psi, mu, mu == 0
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            yield rng.randint(1, full), rng.randint(1, full), rng.randint(0, full), True


def check_revision(op: RevisionOperator, alphabet: Alphabet, mode: str = "exhaustive",
                   samples: int = 100_000, seed: int = 0, subject: str = "revise",
                   postulates: Iterable[str] | None = None,
                   max_witnesses: int = MAX_WITNESSES, stop_at_first: bool = False) -> list[PostulateReport]:
    """R1-R6 and modified success (MS) over pairs/triples of model sets.

    R4 is checked as model-set identity: the operator is applied to sets
    obtained from two different formulas with the same models.
    """
    if mode == "exhaustive" and alphabet.size > 3:
        raise ValueError("exhaustive revision sweeps are limited to 3 atoms")
    names = _select(REVISION_POSTULATES, postulates)
    tally = _Tally(names, max_witnesses)
    call = _memoized_revision(op)
    roundtrip: dict[tuple[int, bool], WorldSet] = {}

    def rt(ws: WorldSet, minimal: bool) -> WorldSet:
        key = (ws.bits, minimal)
        if key not in roundtrip:
            roundtrip[key] = _syntax_roundtrip(ws, minimal)
        return roundtrip[key]

    for phi_bits, psi_bits, mu_bits, with_pair in revision_instances(alphabet, mode, samples, seed):
        phi, psi, mu = WorldSet(alphabet, phi_bits), WorldSet(alphabet, psi_bits), WorldSet(alphabet, mu_bits)
        result = call(phi, psi)

        def witness(**extra: WorldSet) -> Callable[[], dict]:
            def build() -> dict:
                inputs = {"phi": formula_text(phi), "psi": formula_text(psi)}
                outputs = {"phi o psi": formula_text(result)}
                for key, value in extra.items():
                    (inputs if key == "mu" else outputs)[key] = formula_text(value)
                return {"inputs": inputs, "outputs": outputs}
            return build

        if with_pair:
            if tally.wants("R1"):
                tally.record("R1", result <= psi, witness())
            if tally.wants("R2") and (phi & psi):
                tally.record("R2", result == phi & psi, witness())
            if tally.wants("R3"):
                tally.record("R3", bool(result), witness())
            if tally.wants("R4"):
                other = call(rt(phi, False), rt(psi, True))
                tally.record("R4", other == result, witness(**{"phi' o psi'": other}))
            if tally.wants("MS"):
                tally.record("MS", result <= psi or result == phi, witness())
        if tally.wants("R5") or tally.wants("R6"):
            narrowed = call(phi, psi & mu)
            if tally.wants("R5"):
                tally.record("R5", (result & mu) <= narrowed,
                             witness(mu=mu, **{"phi o (psi & mu)": narrowed}))
            if tally.wants("R6") and (result & mu):
                tally.record("R6", narrowed <= (result & mu),
                             witness(mu=mu, **{"phi o (psi & mu)": narrowed}))
        if stop_at_first and any(tally.found(n) for n in names):
            break

    full_mode = "exhaustive" if mode == "exhaustive" else sampled_mode(seed, samples)
    coverage = {"alphabet": str(alphabet),
                "space": "nonempty phi, psi; all mu" if mode == "exhaustive" else "random nonempty phi, psi; random mu",
                "seed": None if mode == "exhaustive" else seed}
    return tally.reports(subject, full_mode, coverage)


# ---------------------------------------------------------------------------
# Merging

MergeOperator = Callable[[Profile, WorldSet], WorldSet]


def merging_operator(agg: str, se: StructuringElement) -> MergeOperator:
    return lambda profile, mu: merge(profile, mu, agg, se).result


def _memoized_merge(op: MergeOperator, alphabet: Alphabet) -> Callable[[tuple[int, ...], int], int]:
    """Cached operator on raw bitmasks; an inconsistent constraint gives falsity."""
    cache: dict[tuple[tuple[int, ...], int], int] = {}

    def call(members: tuple[int, ...], mu: int) -> int:
        key = (members, mu)
        if key not in cache:
            try:
                profile = Profile(tuple(WorldSet(alphabet, m) for m in members))
                cache[key] = op(profile, WorldSet(alphabet, mu)).bits
            except SemanticError:
                cache[key] = 0
        return cache[key]

    return call


@dataclass(frozen=True)
class _MergeInstance:
    """One merging test case; fields not used by a postulate family stay None."""

    profile: tuple[int, ...] | None = None
    mu: int | None = None
    mu2: int | None = None
    other: tuple[int, ...] | None = None
    pair: tuple[int, int] | None = None
    fresh: bool = True  # first instance for this (profile, mu)


def merging_instances(alphabet: Alphabet, mode: str, samples: int, seed: int,
                      sizes: Sequence[int] = (2, 3, 4)) -> Iterator[_MergeInstance]:
    full = (1 << alphabet.world_count) - 1
    nonempty = range(1, full + 1)
    if mode == "exhaustive":
        for profile in itertools.product(nonempty, repeat=2):
            for mu in nonempty:
                for mu2 in range(full + 1):
                    yield _MergeInstance(profile=profile, mu=mu, mu2=mu2, fresh=mu2 == 0)
        for mu in nonempty:
            subsets = [s for s in nonempty if s & ~mu == 0]
            for pair in itertools.product(subsets, repeat=2):
                yield _MergeInstance(mu=mu, pair=pair)
        small = [p for k in (1, 2) for p in itertools.combinations_with_replacement(nonempty, k)]
        for i, first in enumerate(small):  # the union postulates are symmetric in the two profiles
            for second in small[i:]:
                for mu in nonempty:
                    yield _MergeInstance(profile=first, other=second, mu=mu)
        return
    rng = random.Random(seed)
    for _ in range(samples):
        profile = tuple(rng.randint(1, full) for _ in range(rng.choice(sizes)))
        other = tuple(rng.randint(1, full) for _ in range(rng.choice(sizes)))
        mu = rng.randint(1, full)
        pair = (_random_subset(rng, mu), _random_subset(rng, mu))
        yield _MergeInstance(profile, mu, rng.randint(0, full), other, pair)


def _random_subset(rng: random.Random, bits: int) -> int:
    worlds = list(iter_bits(bits))
    while True:
        chosen = sum(1 << w for w in worlds if rng.random() < 0.5)
        if chosen:
            return chosen


def _subset(x: int, y: int) -> bool:
    return x & ~y == 0


class _MergeSweep:
    def __init__(self, op: MergeOperator, alphabet: Alphabet, tally: _Tally):
        self.alphabet = alphabet
        self.call = _memoized_merge(op, alphabet)
        self.tally = tally
        self.roundtrip: dict[int, int] = {}

    def text(self, bits: int) -> str:
        return formula_text(WorldSet(self.alphabet, bits))

    def texts(self, members: Sequence[int]) -> list[str]:
        return [self.text(m) for m in members]

    def run(self, inst: _MergeInstance) -> None:
        if inst.profile is not None and inst.mu2 is not None:
            self.basic(inst.profile, inst.mu, inst.mu2, inst.fresh)
        if inst.pair is not None:
            self.fairness(inst.pair, inst.mu)
        if inst.other is not None:
            self.union(inst.profile, inst.other, inst.mu)

    def basic(self, profile: tuple[int, ...], mu: int, mu2: int, fresh: bool) -> None:
        tally, call = self.tally, self.call
        result = call(profile, mu)

        def witness(**outputs: int) -> Callable[[], dict]:
            def build() -> dict:
                return {"inputs": {"profile": self.texts(profile), "mu": self.text(mu), "mu2": self.text(mu2)},
                        "outputs": {"merge": self.text(result),
                                    **{k: self.text(v) for k, v in outputs.items()}}}
            return build

        if fresh:
            # postulates that do not involve mu2: once per (profile, mu)
            conjunction = mu
            for m in profile:
                conjunction &= m
            if tally.wants("IC0"):
                tally.record("IC0", _subset(result, mu), witness())
            if tally.wants("IC1"):
                tally.record("IC1", result != 0, witness())
            if tally.wants("IC2") and conjunction:
                tally.record("IC2", result == conjunction, witness())
            if tally.wants("IC3"):
                if mu not in self.roundtrip:
                    self.roundtrip[mu] = _syntax_roundtrip(WorldSet(self.alphabet, mu), True).bits
                permuted = call(tuple(reversed(profile)), self.roundtrip[mu])
                tally.record("IC3", permuted == result, witness(**{"merge of reordered profile": permuted}))
        if tally.wants("IC7") or tally.wants("IC8"):
            narrowed = call(profile, mu & mu2)
            restricted = result & mu2
            if tally.wants("IC7"):
                tally.record("IC7", _subset(restricted, narrowed), witness(**{"merge under mu & mu2": narrowed}))
            if tally.wants("IC8") and restricted:
                tally.record("IC8", _subset(narrowed, restricted), witness(**{"merge under mu & mu2": narrowed}))

    def fairness(self, pair: tuple[int, int], mu: int) -> None:
        if not self.tally.wants("IC4"):
            return
        first, second = pair
        result = self.call(pair, mu)

        def build() -> dict:
            return {"inputs": {"phi1": self.text(first), "phi2": self.text(second), "mu": self.text(mu)},
                    "outputs": {"merge": self.text(result)}}

        self.tally.record("IC4", bool(result & first) == bool(result & second), build)

    def union(self, profile: tuple[int, ...], other: tuple[int, ...], mu: int) -> None:
        tally = self.tally
        left, right = self.call(profile, mu), self.call(other, mu)
        joint = self.call(tuple(sorted(profile + other)), mu)  # multiset union
        both = left & right

        def build() -> dict:
            return {"inputs": {"profile1": self.texts(profile), "profile2": self.texts(other), "mu": self.text(mu)},
                    "outputs": {"merge1": self.text(left), "merge2": self.text(right),
                                "merge of union": self.text(joint)}}

        if tally.wants("IC5"):
            tally.record("IC5", _subset(both, joint), build)
        if both:
            if tally.wants("IC6"):
                tally.record("IC6", _subset(joint, both), build)
            if tally.wants("IC6'"):
                tally.record("IC6'", _subset(joint, left | right), build)


def check_merging(op: MergeOperator, alphabet: Alphabet, mode: str = "exhaustive",
                  samples: int = 10_000, seed: int = 0, subject: str = "merge",
                  sizes: Sequence[int] = (2, 3, 4), postulates: Iterable[str] | None = None,
                  max_witnesses: int = MAX_WITNESSES, stop_at_first: bool = False) -> list[PostulateReport]:
    """IC0-IC8 and IC6'.

    Exhaustive mode (at most 2 atoms) covers: profiles of two bases with
    every consistent ``mu`` and every ``mu2``; every pair of bases inside
    every ``mu`` for IC4; every unordered pair of profiles of one or two
    bases for IC5/IC6/IC6'.
    """
    if mode == "exhaustive" and alphabet.size > 2:
        raise ValueError("exhaustive merging sweeps are limited to 2 atoms")
    names = _select(MERGING_POSTULATES, postulates)
    tally = _Tally(names, max_witnesses)
    sweep = _MergeSweep(op, alphabet, tally)
    for inst in merging_instances(alphabet, mode, samples, seed, sizes):
        sweep.run(inst)
        if stop_at_first and any(tally.found(n) for n in names):
            break
    full_mode = "exhaustive" if mode == "exhaustive" else sampled_mode(seed, samples)
    coverage = {"alphabet": str(alphabet),
                "space": ("profiles of size 2; pairs inside mu; unordered profile pairs of sizes 1-2"
                          if mode == "exhaustive" else f"random profiles of sizes {list(sizes)}"),
                "seed": None if mode == "exhaustive" else seed}
    return tally.reports(subject, full_mode, coverage)


# ---------------------------------------------------------------------------
# Explanatory relations


def _explains(ctx: TheoryContext, gamma: WorldSet, alpha: WorldSet, relation: str) -> bool:
    try:
        return explains(ctx, gamma, alpha, relation)
    except (InconsistentObservation, InconsistentExplanans):
        return False


def sigma_subsets(sigma: WorldSet) -> list[WorldSet]:
    """All subsets of ``sigma``; index ``i`` selects the worlds of ``sigma``
    at the positions of the one bits of ``i`` (so index AND/OR is set
    intersection/union)."""
    worlds = list(sigma)
    out = []
    for i in range(1 << len(worlds)):
        out.append(WorldSet(sigma.alphabet, sum(1 << worlds[j] for j in iter_bits(i))))
    return out


# Axis names of the violation arrays.
AXES: dict[str, tuple[str, ...]] = {
    "LLE": ("alpha_prime", "gamma"),
    "RLE": ("gamma_prime", "alpha"),
    "E-CM": ("gamma", "alpha", "beta"),
    "E-W-CM": ("gamma", "alpha", "beta"),
    "E-C-Cut": ("gamma", "alpha", "beta"),
    "E-R-Cut": ("gamma", "alpha", "beta"),
    "E-W-C-Cut": ("gamma", "alpha", "beta"),
    "E-Reflexivity": ("gamma", "alpha"),
    "ROR": ("gamma", "delta", "alpha"),
    "RS": ("gamma_prime", "gamma", "alpha"),
    "LOR": ("gamma", "alpha", "beta"),
    "E-DR": ("alpha", "beta"),
    "E-Con": ("alpha",),
}


class ExplanationTable:
    """Truth table of ``gamma |> alpha`` over all subsets of the theory.

    Only the parts of ``gamma`` and ``alpha`` inside the theory matter, so
    the subsets of the theory represent every formula; LLE and RLE check
    precisely that on arbitrary model sets.
    """

    def __init__(self, ctx: TheoryContext, relation: str):
        self.ctx = ctx
        self.relation = relation
        self.sets = sigma_subsets(ctx.sigma)
        self.index = {s.bits: i for i, s in enumerate(self.sets)}
        size = len(self.sets)
        table = np.zeros((size, size), dtype=bool)
        for a in range(1, size):
            alpha = self.sets[a]
            for g in range(1, size):
                table[g, a] = explains(ctx, self.sets[g], alpha, relation)
        self.table = table
        idx = np.arange(size)
        self.meet = idx[:, None] & idx[None, :]
        self.join = idx[:, None] | idx[None, :]
        self.sub = self.meet == idx[:, None]  # sub[x, y]: x is a subset of y

    @property
    def size(self) -> int:
        return len(self.sets)

    @functools.cached_property
    def on_meet(self) -> np.ndarray:
        """``[g, a, b]`` = ``g`` explains ``a & b``."""
        return self.table[:, self.meet]

    @functools.cached_property
    def on_join(self) -> np.ndarray:
        return self.table[:, self.join]

    def _any_delta(self, rows: np.ndarray) -> np.ndarray:
        """``out[a, b]`` = some delta explains ``a`` and satisfies ``rows[delta, b]``."""
        return (self.table.T.astype(np.int32) @ rows.astype(np.int32)) > 0

    def violations(self, postulate: str) -> np.ndarray:
        E, join, sub = self.table, self.join, self.sub
        if postulate == "E-CM":
            return E[:, :, None] & sub[:, None, :] & ~self.on_meet
        if postulate == "E-W-CM":
            return E[:, :, None] & E[:, None, :] & ~self.on_meet
        if postulate == "E-C-Cut":
            for_all = ~self._any_delta(~sub)
            return self.on_meet & for_all[None] & ~E[:, :, None]
        if postulate == "E-R-Cut":
            exists = self._any_delta(sub)
            return self.on_meet & exists[None] & ~E[:, :, None]
        if postulate == "E-W-C-Cut":
            for_all = ~self._any_delta(~E)
            return self.on_meet & for_all[None] & ~E[:, :, None]
        if postulate == "E-Reflexivity":
            return E & ~np.diagonal(E)[:, None]
        if postulate == "ROR":
            return E[:, None, :] & E[None, :, :] & ~E[join]
        if postulate == "RS":
            consistent = (np.arange(self.size) != 0)[:, None, None]
            return consistent & sub[:, :, None] & E[None, :, :] & ~E[:, None, :]
        if postulate == "LOR":
            return E[:, :, None] & E[:, None, :] & ~self.on_join
        if postulate == "E-DR":
            escapes = (E[:, :, None] & ~self.on_join).any(axis=0)
            return escapes & escapes.T
        if postulate == "E-Con":
            return (np.arange(self.size) != 0) != E.any(axis=0)
        if postulate == "LLE":
            return self._left_equivalence()
        if postulate == "RLE":
            return self._right_equivalence()
        raise ValueError(f"unknown postulate {postulate!r}")

    def _full_sets(self) -> list[WorldSet]:
        alphabet = self.ctx.sigma.alphabet
        return [WorldSet(alphabet, bits) for bits in range(1 << alphabet.world_count)]

    def _left_equivalence(self) -> np.ndarray:
        """``[alpha', gamma]``: the verdict on ``alpha'`` differs from the one on ``alpha' & sigma``."""
        full = self._full_sets()
        out = np.zeros((len(full), self.size), dtype=bool)
        if self.ctx.sigma.is_full:
            return out  # alpha' & sigma is alpha' itself
        for ap, alpha in enumerate(full):
            column = self.table[:, self.index[alpha.bits & self.ctx.sigma.bits]]
            for g in range(1, self.size):
                out[ap, g] = _explains(self.ctx, self.sets[g], alpha, self.relation) != column[g]
        return out

    def _right_equivalence(self) -> np.ndarray:
        full = self._full_sets()
        out = np.zeros((len(full), self.size), dtype=bool)
        if self.ctx.sigma.is_full:
            return out
        for gp, gamma in enumerate(full):
            if gamma.is_empty:
                continue
            row = self.table[self.index[gamma.bits & self.ctx.sigma.bits]]
            for a in range(self.size):
                out[gp, a] = _explains(self.ctx, gamma, self.sets[a], self.relation) != row[a]
        return out

    def instance_sets(self, postulate: str, position: Sequence[int]) -> dict[str, WorldSet]:
        full_axes = {"alpha_prime", "gamma_prime"} if postulate in ("LLE", "RLE") else set()
        alphabet = self.ctx.sigma.alphabet
        sets = {}
        for axis, i in zip(AXES[postulate], position):
            sets[axis] = WorldSet(alphabet, int(i)) if axis in full_axes else self.sets[int(i)]
        if postulate == "LLE":
            sets["alpha"] = sets["alpha_prime"] & self.ctx.sigma
        if postulate == "RLE":
            sets["gamma"] = sets["gamma_prime"] & self.ctx.sigma
        E = self.table
        if postulate == "E-DR":
            a, b = (self.index[sets[k].bits] for k in ("alpha", "beta"))
            union = a | b
            sets["gamma"] = self.sets[int(np.flatnonzero(E[:, a] & ~E[:, union])[0])]
            sets["delta"] = self.sets[int(np.flatnonzero(E[:, b] & ~E[:, union])[0])]
        if postulate == "E-R-Cut":
            a, b = (self.index[sets[k].bits] for k in ("alpha", "beta"))
            sets["delta"] = self.sets[int(np.flatnonzero(E[:, a] & self.sub[:, b])[0])]
        return sets

    def witnesses(self, postulate: str, mask: np.ndarray, limit: int, context: dict) -> list[dict]:
        out: list[dict] = []
        for position in _first_positions(mask, limit):
            sets = self.instance_sets(postulate, position)
            inputs = dict(context, **{k: formula_text(v) for k, v in sets.items()})
            outputs = {}
            for name in _observations(postulate, sets):
                try:
                    core = preferred_explanation(self.ctx, name[1], self.relation).core
                    outputs[f"core({name[0]})"] = formula_text(core)
                except SemanticError:
                    outputs[f"core({name[0]})"] = "undefined"
            out.append({"inputs": inputs, "outputs": outputs})
        return out


def _first_positions(mask: np.ndarray, limit: int) -> list[tuple[int, ...]]:
    """Up to ``limit`` true positions in C order, scanning one slice at a time."""
    found: list[tuple[int, ...]] = []
    if mask.ndim == 1:
        return [(int(i),) for i in np.flatnonzero(mask)[:limit]]
    for i in range(mask.shape[0]):
        if len(found) >= limit:
            break
        if mask[i].any():
            found.extend((i, *rest) for rest in _first_positions(mask[i], limit - len(found)))
    return found


def _observations(postulate: str, sets: dict[str, WorldSet]) -> list[tuple[str, WorldSet]]:
    names = []
    for key in ("alpha", "beta", "alpha_prime"):
        if key in sets:
            names.append((key, sets[key]))
    if "alpha" in sets and "beta" in sets:
        if postulate in ("E-CM", "E-W-CM", "E-C-Cut", "E-R-Cut", "E-W-C-Cut"):
            names.append(("alpha & beta", sets["alpha"] & sets["beta"]))
        if postulate in ("LOR", "E-DR"):
            names.append(("alpha | beta", sets["alpha"] | sets["beta"]))
    if postulate == "E-Reflexivity":
        names.append(("gamma", sets["gamma"]))
    return [(n, s) for n, s in names if s]


def evaluate_instance(postulate: str, ctx: TheoryContext, relation: str, sets: dict[str, WorldSet]) -> bool:
    """Whether the postulate holds on one instance.

    Quantified premises range over every nonempty subset of the theory.
    This is an independent, slower path than :class:`ExplanationTable`.
    """
    def ex(g: WorldSet, a: WorldSet) -> bool:
        return _explains(ctx, g, a, relation)

    def deltas() -> list[WorldSet]:
        return sigma_subsets(ctx.sigma)[1:]

    ent = ctx.entails
    g, a, b = sets.get("gamma"), sets.get("alpha"), sets.get("beta")
    if postulate == "LLE":
        a2 = sets["alpha_prime"]
        return not (ctx.equivalent(a, a2) and ex(g, a)) or ex(g, a2)
    if postulate == "RLE":
        g2 = sets["gamma_prime"]
        return not (ctx.equivalent(g, g2) and ex(g, a)) or ex(g2, a)
    if postulate == "E-CM":
        return not (ex(g, a) and ent(g, b)) or ex(g, a & b)
    if postulate == "E-W-CM":
        return not (ex(g, a) and ex(g, b)) or ex(g, a & b)
    if postulate == "E-C-Cut":
        premise = ex(g, a & b) and all(ent(d, b) for d in deltas() if ex(d, a))
        return not premise or ex(g, a)
    if postulate == "E-R-Cut":
        if "delta" in sets:
            found = ex(sets["delta"], a) and ent(sets["delta"], b)
        else:
            found = any(ex(d, a) and ent(d, b) for d in deltas())
        return not (ex(g, a & b) and found) or ex(g, a)
    if postulate == "E-W-C-Cut":
        premise = ex(g, a & b) and all(ex(d, b) for d in deltas() if ex(d, a))
        return not premise or ex(g, a)
    if postulate == "E-Reflexivity":
        return not ex(g, a) or ex(g, g)
    if postulate == "ROR":
        d = sets["delta"]
        return not (ex(g, a) and ex(d, a)) or ex(g | d, a)
    if postulate == "RS":
        g2 = sets["gamma_prime"]
        return not (ex(g, a) and ent(g2, g) and bool(ctx.sigma & g2)) or ex(g2, a)
    if postulate == "LOR":
        return not (ex(g, a) and ex(g, b)) or ex(g, a | b)
    if postulate == "E-DR":
        d = sets["delta"]
        return not (ex(g, a) and ex(d, b)) or ex(g, a | b) or ex(d, a | b)
    if postulate == "E-Con":
        return bool(ctx.sigma & a) == any(ex(d, a) for d in deltas())
    raise ValueError(f"unknown postulate {postulate!r}")


@dataclass(frozen=True)
class AbductionConfig:
    atoms: str
    sigma: str
    se: str

    def build(self) -> TheoryContext:
        alphabet = Alphabet.of(self.atoms)
        sigma = models(parse(self.sigma, alphabet), alphabet)
        return TheoryContext(sigma, parse_se(self.se, alphabet))

    def describe(self) -> dict:
        return {"atoms": self.atoms, "sigma": self.sigma, "se": self.se}


SIGMA_ONE = "(a -> c) & (b -> c)"
SIGMA_TWO = "(a & c) | (b & c)"


def default_abduction_configs(seed: int = 0, sampled_sigmas: int = 6) -> list[AbductionConfig]:
    """Every theory over two atoms, plus the full theory, two reference
    theories and ``sampled_sigmas`` random ones over three atoms; each with
    a Hamming ball and two restricted elements."""
    configs = []
    two = Alphabet.of("a,b")
    for bits in range(1, 1 << two.world_count):
        for se in ("hamming:1", "restricted:a:1", "restricted2:a,b"):
            configs.append(AbductionConfig("a,b", formula_text(WorldSet(two, bits)), se))
    three = Alphabet.of("a,b,c")
    rng = random.Random(seed)
    theories = ["T", SIGMA_ONE, SIGMA_TWO]
    full = (1 << three.world_count) - 1
    while len(theories) < 3 + sampled_sigmas:
        text = formula_text(WorldSet(three, rng.randint(1, full - 1)))
        if text not in theories:
            theories.append(text)
    for theory in theories:
        for se in ("hamming:1", "restricted:a,b:1", "restricted2:a,b"):
            configs.append(AbductionConfig("a,b,c", theory, se))
    return configs


def _table_summary(config: AbductionConfig, relation: str, postulates: tuple[str, ...],
                   limit: int) -> dict[str, tuple[int, int, list[dict]]]:
    table = ExplanationTable(config.build(), relation)
    context = dict(config.describe(), relation=relation)
    out = {}
    for name in postulates:
        mask = table.violations(name)
        out[name] = (int(mask.size), int(np.count_nonzero(mask)), table.witnesses(name, mask, limit, context))
    return out


def _table_summary_args(args: tuple) -> dict:
    return _table_summary(*args)


def check_abduction(relation: str, configs: Sequence[AbductionConfig] | None = None,
                    postulates: Iterable[str] | None = None, max_witnesses: int = MAX_WITNESSES,
                    jobs: int = 1) -> list[PostulateReport]:
    """Exhaustive check over every subset of each theory in ``configs``."""
    if relation not in ("lneu", "lned", "lc", "ue"):
        raise ValueError(f"relation {relation!r} is not checked against the explanation postulates")
    names = _select(ABDUCTION_POSTULATES, postulates)
    configs = list(configs) if configs is not None else default_abduction_configs()
    jobs_args = [(c, relation, names, max_witnesses) for c in configs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_table_summary_args, jobs_args))
    else:
        summaries = [_table_summary_args(a) for a in jobs_args]
    tally = _Tally(names, max_witnesses)
    for summary in summaries:
        for name in names:
            tally.add(name, *summary[name])
    coverage = {"configurations": len(configs),
                "alphabets": sorted({c.atoms for c in configs}),
                "space": "every subset of each theory for every observation and explanation position"}
    return tally.reports(relation, "exhaustive", coverage)


def abduction_matrix(relations: Sequence[str] = TABLE_RELATIONS,
                     configs: Sequence[AbductionConfig] | None = None,
                     jobs: int = 1) -> dict[str, dict[str, PostulateReport]]:
    """``matrix[postulate][relation]``."""
    matrix: dict[str, dict[str, PostulateReport]] = {p: {} for p in ABDUCTION_POSTULATES}
    for relation in relations:
        for report in check_abduction(relation, configs, jobs=jobs):
            matrix[report.postulate][relation] = report
    return matrix


def matrix_verdicts(matrix: dict[str, dict[str, PostulateReport]],
                    relations: Sequence[str] = TABLE_RELATIONS) -> dict[str, tuple[bool, ...]]:
    return {p: tuple(matrix[p][r].holds for r in relations) for p in matrix}


# ---------------------------------------------------------------------------
# Known counterexamples


@dataclass(frozen=True)
class KnownCounterexample:
    name: str
    postulate: str
    relations: tuple[str, ...]
    sigma: str
    se: str
    sets: tuple[tuple[str, str], ...]
    atoms: str = "a,b,c"

    def context(self) -> TheoryContext:
        return AbductionConfig(self.atoms, self.sigma, self.se).build()

    def instance(self) -> dict[str, WorldSet]:
        alphabet = Alphabet.of(self.atoms)
        return {k: models(parse(v, alphabet), alphabet) for k, v in self.sets}


KNOWN_COUNTEREXAMPLES: tuple[KnownCounterexample, ...] = (
    KnownCounterexample(
        "cautious monotony", "E-CM", ("lneu", "lned"), "T", "hamming:1",
        (("alpha", "!a | b | c"), ("beta", "(!a | !b | !c) & (!a | b | !c)"), ("gamma", "!a & b & c"))),
    KnownCounterexample(
        "cautious cut", "E-C-Cut", ("lneu", "lned"), "T", "hamming:1",
        (("alpha", "a | b | c"), ("beta", "a | !b | !c"), ("gamma", "(a & b & !c) | (a & !b & c)"))),
    KnownCounterexample(
        "reciprocal cut", "E-R-Cut", ("lneu", "lned"), "T", "hamming:1",
        (("alpha", "a | b | c"), ("beta", "a | !b | !c"), ("gamma", "(a & b & !c) | (a & !b & c)"),
         ("delta", "a & b & c"))),
    KnownCounterexample(
        "left or, entailment variant", "LOR", ("lned",), "T", "hamming:1",
        (("alpha", "(a | b | c) & (a | !b | !c)"), ("beta", "(!a | !b | c) & (a | !b | c) & (a | b | c)"),
         ("gamma", "a & !b & c"))),
    KnownCounterexample(
        "left or, equivalence variant", "LOR", ("lneu",), "T", "hamming:1",
        (("alpha", "!b | (!a & !c)"), ("beta", "!c | (!a & !b)"), ("gamma", "!a & !b & !c"))),
    KnownCounterexample(
        "weak cautious cut", "E-W-C-Cut", ("lned",), "T", "hamming:1",
        (("alpha", "(a & b) | (a & c) | (b & c)"), ("beta", "b & c"), ("gamma", "!a & b & c"))),
    KnownCounterexample(
        "reflexivity at a fixed point", "E-Reflexivity", ("lned",), SIGMA_ONE, "restricted:a,b:1",
        (("alpha", "c"), ("gamma", "c & (a | b)"))),
)


def replay(example: KnownCounterexample, relation: str) -> bool:
    """True when the instance violates its postulate for ``relation``."""
    return not evaluate_instance(example.postulate, example.context(), relation, example.instance())


# ---------------------------------------------------------------------------
# Search and the whole suite


def _abduction_subject(subject: str) -> bool:
    return subject in ("lneu", "lned", "lc", "ue")


def find_counterexample(postulate: str, subject: str, budget: int = 20_000,
                        se: str = "hamming:1", seed: int = 0) -> dict | None:
    """First violating instance under a deterministic enumeration, or None.

    ``subject`` is an explanatory relation (lneu, lned, lc, ue), ``revise``,
    ``revise_f`` or ``merge:<agg>``.  ``budget`` bounds the number of
    instances examined.
    """
    if _abduction_subject(subject):
        spent = 0
        for config in default_abduction_configs(seed):
            table = ExplanationTable(config.build(), subject)
            mask = table.violations(postulate)
            if mask.any():
                context = dict(config.describe(), relation=subject)
                return table.witnesses(postulate, mask, 1, context)[0]
            spent += mask.size
            if spent >= budget:
                return None
        return None
    stages = [(Alphabet.of("a,b"), "exhaustive"), (Alphabet.of("a,b,c"), "sampled")]
    spent = 0
    for alphabet, mode in stages:
        element = parse_se(se, alphabet)
        remaining = max(budget - spent, 0)
        if remaining == 0:
            return None
        if subject in ("revise", "revise_f"):
            op = revision_operator(element) if subject == "revise" else unified_revision_operator(element)
            reports = check_revision(op, alphabet, mode, samples=remaining, seed=seed, subject=subject,
                                     postulates=[postulate], max_witnesses=1, stop_at_first=True)
        elif subject.startswith("merge:") and subject[6:] in AGGREGATIONS:
            reports = check_merging(merging_operator(subject[6:], element), alphabet, mode,
                                    samples=remaining, seed=seed, subject=subject,
                                    postulates=[postulate], max_witnesses=1, stop_at_first=True)
        else:
            raise ValueError(f"unknown subject {subject!r}")
        report = reports[0]
        if report.witnesses:
            return report.witnesses[0]
        spent += report.coverage["instances"]
    return None


@dataclass
class SuiteSettings:
    seed: int = 0
    revision_samples: int = 100_000
    merging_samples: int = 10_000
    sampled_sigmas: int = 6
    jobs: int = 1
    se: str = "hamming:1"
    extra: dict[str, Any] = field(default_factory=dict)


def run_suite(settings: SuiteSettings | None = None) -> dict[str, list[dict]]:
    """Every checker with fixed seeds; the output is plain JSON data."""
    s = settings or SuiteSettings()
    two, three = Alphabet.of("a,b"), Alphabet.of("a,b,c")
    out: dict[str, list[dict]] = {"revision": [], "merging": [], "abduction": [], "counterexamples": []}
    for alphabet, mode in ((two, "exhaustive"), (three, "sampled")):
        op = revision_operator(parse_se(s.se, alphabet))
        for report in check_revision(op, alphabet, mode, samples=s.revision_samples, seed=s.seed,
                                     subject=f"revise/{s.se}"):
            out["revision"].append(report.to_dict())
    for agg in AGGREGATIONS:
        for alphabet, mode in ((two, "exhaustive"), (three, "sampled")):
            op = merging_operator(agg, parse_se(s.se, alphabet))
            for report in check_merging(op, alphabet, mode, samples=s.merging_samples, seed=s.seed,
                                        subject=f"merge:{agg}/{s.se}"):
                out["merging"].append(report.to_dict())
    configs = default_abduction_configs(s.seed, s.sampled_sigmas)
    for relation in TABLE_RELATIONS:
        for report in check_abduction(relation, configs, jobs=s.jobs):
            out["abduction"].append(report.to_dict())
    for example in KNOWN_COUNTEREXAMPLES:
        for relation in example.relations:
            out["counterexamples"].append({"name": example.name, "postulate": example.postulate,
                                           "relation": relation, "violated": replay(example, relation)})
    return out


def suite_json(settings: SuiteSettings | None = None) -> str:
    return json.dumps(run_suite(settings), sort_keys=True, indent=1)
