import math
import random

import pytest
from hypothesis import given, settings

from morphlog.errors import EmptyInput
from morphlog.formula import Alphabet, models, parse
from morphlog.morphology import (
    boundaries,
    closing,
    conditional_dilate,
    conditional_erode,
    connected_components,
    dilate,
    dilation_depths,
    erode,
    erosion_sequence,
    hausdorff,
    iterate,
    last_dilation,
    last_erosion,
    min_distance,
    opening,
    reconstruct,
    skeleton,
    stratify,
    ultimate_erosion,
    ultimate_erosion_by_definition,
)
from morphlog.worlds import HammingBall, Restricted, RestrictedExact2, WorldSet, standard_elements

import oracles
from strategies import ABC, world_sets

ABCD = Alphabet.of("a,b,c,d")
UNIT = HammingBall(ABC, 1)
RESTRICTED_AB = Restricted(ABC, ("a", "b"), 1)
SIGMA_ONE = "(a -> c) & (b -> c)"


def m(text: str, alphabet: Alphabet = ABC) -> WorldSet:
    return models(parse(text, alphabet), alphabet)


def ws(*bits: str, alphabet: Alphabet = ABC) -> WorldSet:
    return WorldSet.of(alphabet, bits)


class TestDilationErosion:
    def test_dilation_of_two_far_minterms(self):
        assert dilate(m("(a&b&c)|(!a&!b&c)"), UNIT) == m("(!a|b|c)&(a|!b|c)")

    def test_dilation_of_empty(self):
        for se in standard_elements(ABC):
            assert dilate(WorldSet.empty(ABC), se).is_empty

    def test_restricted_dilation(self):
        assert dilate(m("a&b&c"), RESTRICTED_AB) == ws("111", "011", "101")

    def test_erosion_examples(self):
        assert erode(m("c|(!a&!b)"), UNIT) == m("!a&!b&c")
        assert erode(m("(a|!b|!c)&(a|b|c)"), UNIT) == m("(a&!b&c)|(a&b&!c)")

    def test_erosion_of_full(self):
        for se in standard_elements(ABC):
            assert erode(WorldSet.full(ABC), se).is_full

    @pytest.mark.parametrize("n", [2, 3])
    def test_against_neighborhood_oracle(self, n):
        alphabet = Alphabet(tuple("abc"[:n]))
        for se in standard_elements(alphabet):
            table = oracles.neighbor_table(se)
            for x in oracles.all_sets(alphabet):
                s = set(x)
                assert set(dilate(x, se)) == oracles.dilate(s, table)
                assert set(erode(x, se)) == oracles.erode(s, table)

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            dilate(WorldSet.empty(ABCD), UNIT)


class TestIterate:
    def test_zero_is_identity(self):
        x = m("a|b")
        assert iterate(x, UNIT, 0) == x
        assert iterate(x, UNIT, 0, "erode") == x

    def test_double_erosion_empties(self):
        assert iterate(m("c|(!a&!b)"), UNIT, 2, "erode").is_empty

    def test_background_theory_dilates_to_everything(self):
        assert iterate(m(SIGMA_ONE), UNIT, 1).is_full

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            iterate(m("a"), UNIT, -1)
        with pytest.raises(ValueError):
            iterate(m("a"), UNIT, 1, "shrink")

    def test_matches_breadth_first_distance(self):
        rng = random.Random(3)
        table = oracles.neighbor_table(HammingBall(ABCD, 1))
        for _ in range(200):
            x = oracles.random_set(rng, ABCD)
            depth = oracles.distances_from(x, table)
            for k in range(5):
                expected = {v for v, d in depth.items() if d <= k}
                assert set(iterate(WorldSet.of(ABCD, x), HammingBall(ABCD, 1), k)) == expected


class TestConditional:
    def test_one_step_inside_c(self):
        assert conditional_dilate(m("a&b&c"), m("c"), UNIT, 1) == ws("111", "011", "101")

    def test_zero_steps(self):
        x, cond = m("a&!b"), m("a|c")
        assert conditional_dilate(x, cond, UNIT, 0) == x & cond
        assert conditional_erode(x, cond, UNIT, 0) == x | cond

    def test_against_loop_oracle(self):
        table = oracles.neighbor_table(UNIT)
        for x in oracles.all_sets(ABC):
            cond = ~x | m("a")
            for n in range(3):
                grown = set(x) & set(cond)
                shrunk = set(x) | set(cond)
                for _ in range(n):
                    grown = oracles.dilate(grown, table) & set(cond)
                    shrunk = oracles.erode(shrunk, table) | set(cond)
                assert set(conditional_dilate(x, cond, UNIT, n)) == grown
                assert set(conditional_erode(x, cond, UNIT, n)) == shrunk


class TestReconstruction:
    MASK = "(a&b)|(a&c)|(b&c)|(!a&!b&!c)"

    def test_marked_component(self):
        assert reconstruct(m("a&b&c"), m(self.MASK), UNIT) == m("(a&b)|(a&c)|(b&c)")

    def test_no_marker(self):
        assert reconstruct(WorldSet.empty(ABC), m(self.MASK), UNIT).is_empty

    def test_mask_reconstructs_itself(self):
        for x in oracles.all_sets(ABC):
            assert reconstruct(x, x, UNIT) == x

    def test_selects_components_meeting_the_marker(self):
        se = HammingBall(ABCD, 1)
        table = oracles.neighbor_table(se)
        rng = random.Random(5)
        for _ in range(300):
            mask = oracles.random_set(rng, ABCD, nonempty=False)
            marker = oracles.random_set(rng, ABCD, nonempty=False)
            expected: set[int] = set()
            for part in oracles.components(mask, table):
                if part & marker:
                    expected |= part
            got = reconstruct(WorldSet.of(ABCD, marker), WorldSet.of(ABCD, mask), se)
            assert set(got) == expected


class TestFilters:
    MAJORITY_PLUS_ORIGIN = "(a&b)|(a&c)|(b&c)|(!a&!b&!c)"

    def test_opening_removes_isolated_point(self):
        assert opening(m(self.MAJORITY_PLUS_ORIGIN), UNIT) == m("(a&b)|(a&c)|(b&c)")

    def test_empty(self):
        assert opening(WorldSet.empty(ABC), UNIT).is_empty
        assert closing(WorldSet.empty(ABC), UNIT).is_empty

    @settings(max_examples=200, deadline=None)
    @given(world_sets())
    def test_filter_properties(self, x):
        for se in (UNIT, RESTRICTED_AB, RestrictedExact2(ABC, ("a", "b"))):
            o, c = opening(x, se), closing(x, se)
            assert o <= x <= c
            assert opening(o, se) == o
            assert closing(c, se) == c


class TestLastOperators:
    def test_last_erosion_example(self):
        core, depth = last_erosion(m("(a|!b|!c)&(a|b|c)"), UNIT)
        assert core == m("(a&!b&c)|(a&b&!c)")
        assert depth == 1

    def test_full_set_is_a_fixed_point(self):
        core, depth = last_erosion(WorldSet.full(ABC), UNIT)
        assert core.is_full and depth == 0

    def test_restricted_fixed_point(self):
        core, depth = last_erosion(m(SIGMA_ONE + " & c"), RESTRICTED_AB)
        assert core == m("c")
        assert depth == 0

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            last_erosion(WorldSet.empty(ABC), UNIT)
        with pytest.raises(EmptyInput):
            last_dilation(WorldSet.empty(ABC), UNIT)

    def test_last_dilation(self):
        for x in oracles.all_sets(ABC):
            if x:
                full, depth = last_dilation(x, UNIT)
                assert full.is_full and depth <= 3
        assert last_dilation(m("a&b&c"), RESTRICTED_AB) == (m("c"), 2)
        assert last_dilation(WorldSet.full(ABC), UNIT) == (WorldSet.full(ABC), 0)

    def test_erosion_sequence_stops_at_repeat(self):
        assert erosion_sequence(m("c"), RESTRICTED_AB) == [m("c").bits]


class TestUltimateErosion:
    FOUR_ATOMS = "(a&b)|(a&c)|(b&c)|(!a&!b&!c&!d)"

    def test_example_in_four_atoms(self):
        x = m(self.FOUR_ATOMS, ABCD)
        se = HammingBall(ABCD, 1)
        expected = m("(a&b&c)|(!a&!b&!c&!d)", ABCD)
        assert ultimate_erosion(x, se) == expected
        assert ultimate_erosion_by_definition(x, se) == expected

    def test_singleton_and_empty(self):
        assert ultimate_erosion(ws("010"), UNIT) == ws("010")
        assert ultimate_erosion(WorldSet.empty(ABC), UNIT).is_empty

    def test_full_set_is_a_fixed_point(self):
        assert ultimate_erosion(WorldSet.full(ABC), UNIT).is_empty

    def test_matches_regional_maxima(self):
        for x in oracles.all_sets(ABC):
            assert set(ultimate_erosion(x, UNIT)) == oracles.regional_maxima_of_depth(ABC, set(x))


class TestSkeleton:
    def test_majority_plus_origin(self):
        got = skeleton(m("(a&b)|(a&c)|(b&c)|(!a&!b&!c)"), UNIT)
        assert got == m("(!a&!b&!c)|(a&b&c)")

    def test_ball_has_its_center(self):
        for center in range(8):
            assert skeleton(UNIT.neighborhood(center), UNIT) == ws(ABC.world_bits(center))

    def test_empty_and_full(self):
        assert skeleton(WorldSet.empty(ABC), UNIT).is_empty
        assert skeleton(WorldSet.full(ABC), UNIT).is_empty


class TestComponents:
    def test_majority_plus_origin(self):
        parts = connected_components(m("(a&b)|(a&c)|(b&c)|(!a&!b&!c)"), UNIT)
        assert parts == [ws("000"), m("(a&b)|(a&c)|(b&c)")]

    def test_connected_and_empty(self):
        assert connected_components(m("a|b"), UNIT) == [m("a|b")]
        assert connected_components(WorldSet.empty(ABC), UNIT) == []

    def test_partition_matches_graph_oracle(self):
        for se in (UNIT, RESTRICTED_AB, HammingBall(ABC, 2)):
            table = oracles.neighbor_table(se.unit())
            for x in oracles.all_sets(ABC):
                got = [set(p) for p in connected_components(x, se)]
                assert got == oracles.components(set(x), table)

    def test_operators_distribute_over_components(self):
        se = HammingBall(ABCD, 1)
        rng = random.Random(11)
        for _ in range(300):
            x = WorldSet.of(ABCD, oracles.random_set(rng, ABCD))
            if x.is_full:
                continue
            parts = connected_components(x, se)
            for op in (ultimate_erosion, opening, skeleton, lambda y, s: erode(y, s)):
                joined = WorldSet.empty(ABCD)
                for part in parts:
                    joined = joined | op(part, se)
                assert joined == op(x, se)


class TestBoundaries:
    def test_external_of_point(self):
        external, _ = boundaries(m("a&b&c"), UNIT)
        assert external == ws("011", "101", "110")

    def test_internal_of_full(self):
        _, internal = boundaries(WorldSet.full(ABC), UNIT)
        assert internal.is_empty

    def test_internal_after_erosion(self):
        x = m("c|(!a&!b)")
        _, internal = boundaries(x, UNIT)
        assert internal == x - ws("001")


class TestStratification:
    def test_unit_ball_ranks(self):
        strat = stratify(m(SIGMA_ONE), UNIT)
        assert strat.table() == {0: ["001"], 1: ["000", "011", "101", "111"], 2: ["010", "100", "110"]}

    def test_restricted_ranks(self):
        strat = stratify(m(SIGMA_ONE), RESTRICTED_AB)
        assert strat.table() == {0: ["001", "011", "101", "111"], 1: ["000"], 2: ["010", "100"], 3: ["110"]}

    def test_full_theory(self):
        strat = stratify(WorldSet.full(ABC), UNIT)
        assert set(strat.ranks) == {0}

    def test_unreachable_worlds_rank_infinity(self):
        strat = stratify(m("a&b&c"), RESTRICTED_AB)
        for world in range(8):
            assert (strat.rank(world) == math.inf) == (world not in m("c"))

    def test_levels_nested_and_order_total(self):
        for se in standard_elements(ABC):
            for sigma in oracles.all_sets(ABC):
                if not sigma:
                    continue
                strat = stratify(sigma, se)
                finite = sorted({r for r in strat.ranks if r != math.inf})
                for low, high in zip(finite, finite[1:]):
                    assert strat.level(low) <= strat.level(high)
                reach = last_dilation(sigma, se)[0]
                assert {w for w, r in enumerate(strat.ranks) if r != math.inf} == set(reach)
                for w1 in range(8):
                    for w2 in range(8):
                        assert strat.leq(w1, w2) or strat.leq(w2, w1)

    def test_empty_theory(self):
        with pytest.raises(EmptyInput):
            stratify(WorldSet.empty(ABC), UNIT)

    def test_minimal(self):
        strat = stratify(m(SIGMA_ONE), UNIT)
        assert strat.minimal(m("!a")) == ws("001")
        assert strat.minimal(WorldSet.empty(ABC)).is_empty


class TestDistances:
    def test_term_sets(self):
        x = m("a&!b&c", ABCD)
        y = m("b&c&d", ABCD)
        assert min_distance(x, y, HammingBall(ABCD, 1)) == 1

    def test_self_and_diameter(self):
        x = m("a|b")
        assert min_distance(x, x, UNIT) == 0
        assert hausdorff(ws("000"), ws("111"), UNIT) == 3

    def test_against_pairwise_formulas(self):
        rng = random.Random(2)
        se = HammingBall(ABCD, 1)
        for _ in range(300):
            x = oracles.random_set(rng, ABCD)
            y = oracles.random_set(rng, ABCD)
            d = lambda p, q: oracles.distance(ABCD, p, q)
            expected_min = min(d(p, q) for p in x for q in y)
            expected_h = max(max(min(d(p, q) for q in y) for p in x), max(min(d(p, q) for p in x) for q in y))
            wx, wy = WorldSet.of(ABCD, x), WorldSet.of(ABCD, y)
            assert min_distance(wx, wy, se) == expected_min
            assert hausdorff(wx, wy, se) == expected_h

    def test_depths_match_breadth_first_search(self):
        for se in standard_elements(ABC):
            table = oracles.neighbor_table(se)
            for x in oracles.all_sets(ABC):
                if x:
                    expected = oracles.distances_from(set(x), table)
                    assert list(dilation_depths(x, se)) == [expected[w] for w in range(8)]
