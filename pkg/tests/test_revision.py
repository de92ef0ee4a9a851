import math
import random

import pytest

from morphlog.errors import EmptyBelief
from morphlog.formula import Alphabet, models, parse
from morphlog.revision import faithful_order, revise, revise_via_order
from morphlog.worlds import HammingBall, Restricted, RestrictedExact2, WorldSet, standard_elements

import oracles

ABC = Alphabet.of("a,b,c")
UNIT = HammingBall(ABC, 1)
RESTRICTED_AB = Restricted(ABC, ("a", "b"), 1)


def m(text, alphabet=ABC):
    return models(parse(text, alphabet), alphabet)


class TestRevise:
    def test_bank_teller_instance(self):
        outcome = revise(m("a&b&c"), m("!c"), UNIT)
        assert outcome.result == m("a&b&!c")
        assert outcome.dilation_depth == 1
        assert not outcome.limited

    def test_consistent_input_is_conjunction(self):
        outcome = revise(m("a|b"), m("!a|c"), UNIT)
        assert outcome.result == m("(a|b)&(!a|c)")
        assert outcome.dilation_depth == 0

    def test_unreachable_input_keeps_beliefs(self):
        outcome = revise(m("a&b&c"), m("!c"), RESTRICTED_AB)
        assert outcome.limited and outcome.unreachable
        assert outcome.result == m("a&b&c")

    def test_empty_input_is_limited(self):
        outcome = revise(m("a"), WorldSet.empty(ABC), UNIT)
        assert outcome.limited and outcome.result == m("a")

    def test_empty_beliefs(self):
        with pytest.raises(EmptyBelief):
            revise(WorldSet.empty(ABC), m("a"), UNIT)

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_distance_oracle(self, n):
        alphabet = Alphabet(tuple("abc"[:n]))
        se = HammingBall(alphabet, 1)
        rng = random.Random(n)
        sets = [x for x in oracles.all_sets(alphabet) if x]
        pairs = [(p, q) for p in sets for q in sets] if n == 2 else [
            (rng.choice(sets), rng.choice(sets)) for _ in range(3000)]
        for phi, psi in pairs:
            expected = oracles.dalal_revision(alphabet, set(phi), set(psi))
            assert set(revise(phi, psi, se).result) == expected

    def test_outcome_invariant(self):
        for se in standard_elements(ABC):
            for phi in oracles.all_sets(ABC):
                if not phi:
                    continue
                for psi in (m("!a"), m("a&!c"), m("!a&!b&!c")):
                    outcome = revise(phi, psi, se)
                    if outcome.limited:
                        assert outcome.result == phi
                    else:
                        assert outcome.result and outcome.result <= psi


class TestFaithfulOrder:
    def test_distance_to_point(self):
        order = faithful_order(m("a&b&c"), UNIT)
        for world in range(8):
            assert order.rank(world) == oracles.distance(ABC, world, 0b111)

    def test_models_rank_zero(self):
        phi = m("a|!c")
        order = faithful_order(phi, UNIT)
        assert {w for w in range(8) if order.rank(w) == 0} == set(phi)

    def test_full(self):
        assert set(faithful_order(WorldSet.full(ABC), UNIT).ranks) == {0}

    def test_unreachable_rank(self):
        order = faithful_order(m("a&b&c"), RESTRICTED_AB)
        assert order.rank(0b110) == math.inf

    def test_empty(self):
        with pytest.raises(EmptyBelief):
            faithful_order(WorldSet.empty(ABC), UNIT)


class TestOrderRepresentation:
    def test_bank_teller_instance(self):
        assert revise_via_order(m("a&b&c"), m("!c"), UNIT) == m("a&b&!c")

    def test_input_inside_beliefs(self):
        assert revise_via_order(m("a"), m("a&b"), UNIT) == m("a&b")

    def test_exhaustive_agreement(self):
        for se in (UNIT, RESTRICTED_AB, RestrictedExact2(ABC, ("a", "b"))):
            for phi in oracles.all_sets(ABC):
                if not phi:
                    continue
                for psi in oracles.all_sets(ABC):
                    outcome = revise(phi, psi, se)
                    if not outcome.limited:
                        assert revise_via_order(phi, psi, se) == outcome.result


def test_modified_success_with_restricted_elements():
    for se in (RESTRICTED_AB, Restricted(ABC, ("a",), 1), RestrictedExact2(ABC, ("a", "b"))):
        limited = 0
        for phi in oracles.all_sets(ABC):
            if not phi:
                continue
            for psi in oracles.all_sets(ABC):
                result = revise(phi, psi, se).result
                assert result <= psi or result == phi
                limited += not result <= psi
        assert limited > 0
