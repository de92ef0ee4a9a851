import itertools
import json
import random

import numpy as np
import pytest

from morphlog.formula import Alphabet, models, parse
from morphlog.merging import Profile, check_sym, merge
from morphlog.postulates import (
    ABDUCTION_POSTULATES,
    AXES,
    HOLDS,
    KNOWN_COUNTEREXAMPLES,
    MERGING_POSTULATES,
    REVISION_POSTULATES,
    VIOLATED,
    AbductionConfig,
    ExplanationTable,
    PostulateReport,
    check_abduction,
    check_merging,
    check_revision,
    default_abduction_configs,
    evaluate_instance,
    find_counterexample,
    formula_text,
    merging_operator,
    replay,
    revision_operator,
    sampled_mode,
    sigma_subsets,
    unified_revision_operator,
)
from morphlog.worlds import Explicit, HammingBall, Restricted, WorldSet

AB = Alphabet.of("a,b")
ABC = Alphabet.of("a,b,c")
FOUR_CYCLE = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (3, 0)}


def verdicts(reports):
    return {r.postulate: r.verdict for r in reports}


def failing(reports):
    return sorted(r.postulate for r in reports if not r.holds)


class TestReports:
    def test_schema(self):
        report = PostulateReport("R1", "revise", "exhaustive", {"instances": 3}, HOLDS)
        data = json.loads(report.to_json())
        assert set(data) == {"postulate", "subject", "mode", "coverage", "verdict", "witnesses"}
        assert report.holds

    def test_sampled_mode_label(self):
        assert sampled_mode(4, 100) == "sampled(seed=4,count=100)"

    def test_formula_text(self):
        assert formula_text(WorldSet.full(AB)) == "T"
        assert formula_text(WorldSet.empty(AB)) == "F"
        assert formula_text(models(parse("a & b"), AB)) == "a & b"

    def test_unknown_postulate(self):
        with pytest.raises(ValueError, match="R9"):
            check_revision(revision_operator(HammingBall(AB, 1)), AB, postulates=["R9"])


class TestRevisionChecker:
    def test_hamming_holds(self):
        reports = check_revision(revision_operator(HammingBall(AB, 1)), AB)
        assert [r.postulate for r in reports] == list(REVISION_POSTULATES)
        assert failing(reports) == []
        assert all(r.mode == "exhaustive" for r in reports)

    def test_broken_operator_violates_vacuity(self):
        reports = check_revision(lambda phi, psi: psi, AB, postulates=["R1", "R2"])
        assert verdicts(reports) == {"R1": HOLDS, "R2": VIOLATED}
        witness = reports[1].witnesses[0]
        phi = models(parse(witness["inputs"]["phi"], AB), AB)
        psi = models(parse(witness["inputs"]["psi"], AB), AB)
        assert phi & psi and phi & psi != psi

    def test_restricted_elements_lose_success_but_keep_modified_success(self):
        reports = check_revision(revision_operator(Restricted(AB, ("a",), 1)), AB)
        assert "R1" in failing(reports)
        assert verdicts(reports)["MS"] == HOLDS

    def test_unified_revision(self):
        reports = check_revision(unified_revision_operator(HammingBall(AB, 1)), AB)
        assert failing(reports) == ["R2"]

    def test_sampled_mode_is_seeded(self):
        op = revision_operator(HammingBall(ABC, 1))
        first = [r.to_dict() for r in check_revision(op, ABC, "sampled", samples=500, seed=3)]
        second = [r.to_dict() for r in check_revision(op, ABC, "sampled", samples=500, seed=3)]
        assert first == second
        assert first[0]["mode"] == "sampled(seed=3,count=500)"

    def test_exhaustive_scale_limit(self):
        with pytest.raises(ValueError):
            check_revision(revision_operator(HammingBall(Alphabet.of("a,b,c,d"), 1)), Alphabet.of("a,b,c,d"))


class TestMergingChecker:
    def test_asymmetric_element_breaks_fairness(self):
        se = Explicit.from_map(AB, FOUR_CYCLE, check=False)
        assert not check_sym(se).passed
        reports = check_merging(merging_operator("max", se), AB, postulates=["IC4"])
        assert verdicts(reports) == {"IC4": VIOLATED}

    def test_fairness_witness_instance(self):
        se = Explicit.from_map(AB, FOUR_CYCLE, check=False)
        m = lambda t: models(parse(t, AB), AB)
        phi1, phi2, mu = m("!a & !b"), m("!a & b"), m("!a")
        result = merge(Profile((phi1, phi2)), mu, "max", se).result
        assert bool(result & phi1) != bool(result & phi2)

    @pytest.mark.parametrize("se", [HammingBall(AB, 1), Restricted(AB, ("a", "b"), 1)])
    def test_fairness_tracks_symmetry(self, se):
        assert check_sym(se).passed
        reports = check_merging(merging_operator("max", se), AB, postulates=["IC4"])
        assert reports[0].holds

    def test_sampled_sum(self):
        reports = check_merging(merging_operator("sum", HammingBall(ABC, 1)), ABC, "sampled", samples=300, seed=2)
        assert [r.postulate for r in reports] == list(MERGING_POSTULATES)
        assert failing(reports) == []

    def test_exhaustive_scale_limit(self):
        with pytest.raises(ValueError):
            check_merging(merging_operator("sum", HammingBall(ABC, 1)), ABC)


def _holds_by_enumeration(postulate, table, sets):
    """Slow-path verdict, filling in the existentially bound positions."""
    if postulate == "E-DR":
        return all(evaluate_instance(postulate, table.ctx, table.relation, dict(sets, gamma=g, delta=d))
                   for g in table.sets[1:] for d in table.sets[1:])
    sets = {k: v for k, v in sets.items() if not (postulate == "E-R-Cut" and k == "delta")}
    return evaluate_instance(postulate, table.ctx, table.relation, sets)


class TestExplanationTable:
    def test_subset_indexing(self):
        sigma = models(parse("a | b"), AB)
        subsets = sigma_subsets(sigma)
        assert len(subsets) == 8 and subsets[0].is_empty and subsets[-1] == sigma
        for i, j in itertools.product(range(8), repeat=2):
            assert subsets[i & j] == subsets[i] & subsets[j]
            assert subsets[i | j] == subsets[i] | subsets[j]

    @pytest.mark.parametrize("relation", ["lneu", "lned", "lc"])
    def test_agrees_with_slow_path(self, relation):
        rng = random.Random(0)
        configs = [c for c in default_abduction_configs() if c.atoms == "a,b"]
        for config in configs:
            table = ExplanationTable(config.build(), relation)
            for postulate in ABDUCTION_POSTULATES:
                mask = table.violations(postulate)
                assert mask.ndim == len(AXES[postulate])
                violated = [tuple(p) for p in np.argwhere(mask)[:15]]
                positions = list(np.ndindex(mask.shape))
                held = [p for p in rng.sample(positions, min(40, len(positions))) if not mask[p]]
                for position in violated:
                    sets = table.instance_sets(postulate, position)
                    assert not evaluate_instance(postulate, table.ctx, relation, sets), (config, postulate)
                for position in held:
                    if postulate in ("E-DR", "E-R-Cut"):
                        sets = {axis: table.sets[int(i)] for axis, i in zip(AXES[postulate], position)}
                    else:
                        sets = table.instance_sets(postulate, position)
                    assert _holds_by_enumeration(postulate, table, sets), (config, postulate)

    def test_unknown_postulate(self):
        table = ExplanationTable(AbductionConfig("a,b", "T", "hamming:1").build(), "lc")
        with pytest.raises(ValueError):
            table.violations("E-Whatever")


class TestAbductionChecker:
    def test_last_consistent_erosion_on_full_theory(self):
        reports = check_abduction("lc", [AbductionConfig("a,b,c", "T", "hamming:1")])
        assert failing(reports) == []

    def test_equivalence_variant_fails_cautious_monotony_with_known_instance(self):
        config = AbductionConfig("a,b,c", "T", "hamming:1")
        reports = check_abduction("lneu", [config], postulates=["E-CM"])
        assert not reports[0].holds and reports[0].witnesses
        table = ExplanationTable(config.build(), "lneu")
        mask = table.violations("E-CM")
        example = next(e for e in KNOWN_COUNTEREXAMPLES if e.postulate == "E-CM")
        sets = example.instance()
        position = tuple(table.index[sets[axis].bits] for axis in AXES["E-CM"])
        assert mask[position]

    def test_entailment_variant_keeps_weak_cautious_monotony(self):
        reports = check_abduction("lned", [AbductionConfig("a,b,c", "T", "hamming:1"),
                                           AbductionConfig("a,b,c", "(a -> c) & (b -> c)", "restricted:a,b:1")],
                                  postulates=["E-W-CM", "E-Reflexivity"])
        assert verdicts(reports) == {"E-W-CM": HOLDS, "E-Reflexivity": VIOLATED}

    def test_rejects_unified_relation(self):
        with pytest.raises(ValueError):
            check_abduction("f")

    def test_default_configs_are_seeded(self):
        assert default_abduction_configs(5) == default_abduction_configs(5)
        assert len(default_abduction_configs(0, 2)) == 45 + 5 * 3


class TestCounterexamples:
    @pytest.mark.parametrize("example", KNOWN_COUNTEREXAMPLES, ids=lambda e: f"{e.postulate}-{'-'.join(e.relations)}")
    def test_replays_for_its_relations_only(self, example):
        for relation in ("lneu", "lned", "lc"):
            assert replay(example, relation) == (relation in example.relations)

    def test_search_finds_disjunction_failure(self):
        witness = find_counterexample("LOR", "lned")
        assert witness is not None and witness["inputs"]["relation"] == "lned"

    def test_search_finds_cut_failure(self):
        assert find_counterexample("E-C-Cut", "lneu") is not None

    def test_search_returns_none_when_postulate_holds(self):
        assert find_counterexample("R1", "revise", budget=5_000) is None
        assert find_counterexample("E-CM", "lc", budget=2_000) is None

    def test_search_on_operators(self):
        assert find_counterexample("R2", "revise_f") is not None
        assert find_counterexample("IC6", "merge:max") is not None
        assert find_counterexample("IC4", "merge:sum", budget=2_000) is None

    def test_unknown_subject(self):
        with pytest.raises(ValueError):
            find_counterexample("R1", "contract")
