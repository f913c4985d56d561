"""
Tests for Condition-1 data, the regularity witness searches, the Hausdorff
scan and the fixed-point sweep.
"""
import pytest

from conftest import trunc, w
from monoid_functions import InvalidInstance, parse_word
from utils.hull import apply, format_hull, parse_hull
from utils.ideals import GeneralizedIdeal, IdealSemilattice, family, parse_ideal, principal
from workflows.regularity_workflow import (
    RegularityWorkflow,
    _format_pattern,
    condition1_check,
    cstar_regularity_witness,
    gp_eq_g_check,
    hausdorff_witness_search,
    hull_pool,
    reduce_to_domain,
    strong_regularity_witness,
    sufficient_conditions_check,
)

BUDGET = 500


class TestReduceToDomain:
    def test_reduced_letter_is_restricted(self, S, closure_S):
        X = family(S, w('b'))
        (h,) = reduce_to_domain(S, X, [parse_hull(S, "a")])
        assert apply(S, h, parse_word(S, "b y[0]"), closure_S.bound) == parse_word(S, "b y[1]")
        assert apply(S, h, w('a'), closure_S.bound) is None


class TestCondition1:
    def test_S_leaves_y_words_unfixed(self, S, closure_S):
        X = family(S, w('b'))
        hs = reduce_to_domain(S, X, [parse_hull(S, "a")])
        verdict = condition1_check(S, X, hs, closure_S)
        assert verdict.fails
        assert verdict.certificate["unfixed"] == "b y[0]"

    def test_T_fixes_both_families(self, T, closure_T):
        X = family(T, w('b'))
        hs = reduce_to_domain(T, X, [parse_hull(T, "a"), parse_hull(T, "c")])
        assert condition1_check(T, X, hs, closure_T).holds

    def test_domain_must_contain_region(self, S, closure_S):
        with pytest.raises(InvalidInstance):
            condition1_check(S, family(S, w('b')), [parse_hull(S, "x[0]^-1")], closure_S)


class TestWitnessSearch:
    def test_strong_witness_in_S(self, S, closure_S):
        X = principal(S, parse_word(S, "b x[0]"))
        hs = reduce_to_domain(S, X, [parse_hull(S, "a")])
        verdict = strong_regularity_witness(S, X, [], hs, closure_S, BUDGET)
        assert verdict.holds
        assert verdict.certificate["Y"] == ["Principal(b x[0])"]

    def test_cstar_in_T_stops_at_the_window(self, T, closure_T):
        X = family(T, w('b'))
        hs = reduce_to_domain(T, X, [parse_hull(T, "a"), parse_hull(T, "c")])
        verdict = cstar_regularity_witness(T, GeneralizedIdeal(X), hs, closure_T, BUDGET)
        assert verdict.unknown
        assert "uncovered" in verdict.note
        assert "beyond the window" in verdict.note

    def test_empty_region_holds_trivially(self, S, closure_S):
        X = principal(S, w('b'))
        verdict = strong_regularity_witness(S, X, [X], [parse_hull(S, "e")], closure_S, BUDGET)
        assert verdict.holds
        assert verdict.certificate["Y"] == []

    def test_gp_requires_pointwise_fix(self, S, closure_S):
        with pytest.raises(InvalidInstance):
            gp_eq_g_check(S, parse_hull(S, "a"), parse_ideal(S, "Family(b)"), [], closure_S, BUDGET)


class TestHausdorffScan:
    @staticmethod
    def _found(p, closure):
        return {(format_hull(g), _format_pattern(pattern))
                for g, pattern, _ in hausdorff_witness_search(p, closure, BUDGET)}

    def test_S(self, S, closure_S):
        assert ("a", "b x[n]") in self._found(S, closure_S)

    def test_T(self, T, closure_T):
        found = self._found(T, closure_T)
        assert ("a", "b x[n]") in found
        assert ("c", "b y[n]") in found

    def test_free_monoid(self, free2):
        closure = IdealSemilattice(free2, trunc(3, 0, 0)).close(500)
        assert hausdorff_witness_search(free2, closure, BUDGET) == []


def test_hull_pool_has_letters_and_conjugates(S):
    assert [format_hull(h) for h in hull_pool(S)] == ["a", "b", "a^-1 b a", "b^-1 a b"]


class TestRegularityWorkflow:
    def test_strong_checks_hold_on_generated_instances(self, S, closure_S):
        results = RegularityWorkflow(S, closure_S).run_strong_checks(BUDGET, limit=5)
        assert 0 < len(results) <= 5
        assert all(row["status"] == "holds" for row in results)

    def test_condition1_instances_respect_limit(self, S, closure_S):
        assert len(RegularityWorkflow(S, closure_S).condition1_instances(limit=3)) <= 3

    def test_fix_sweep(self, S):
        lattice = IdealSemilattice(S, trunc(4, 0, 0))
        sweep = RegularityWorkflow(S, lattice).fix_sweep(parse_word(S, "y[0]"), family(S, ()), max_length=4)
        assert sweep["target"] == "y[0]"
        assert sweep["domain"] == "Family(e)"
        assert "e" in sweep["classes"]
        assert sweep["all_e_or_projection"]


class TestObstructionAtEveryBudget:
    @pytest.fixture(scope="class")
    def instance(self, T):
        X = family(T, w('b'))
        return X, reduce_to_domain(T, X, [parse_hull(T, "a"), parse_hull(T, "c")])

    @pytest.mark.parametrize("budget", [1, 5, 50, 500])
    def test_strong(self, T, closure_T, instance, budget):
        X, hs = instance
        verdict = strong_regularity_witness(T, X, [], hs, closure_T, budget)
        assert verdict.unknown
        assert "beyond the window" in verdict.note
        assert "uncovered_example" in verdict.certificate["obstruction"]

    @pytest.mark.parametrize("budget", [1, 5, 50, 500])
    def test_cstar(self, T, closure_T, instance, budget):
        X, hs = instance
        verdict = cstar_regularity_witness(T, GeneralizedIdeal(X), hs, closure_T, budget)
        assert verdict.unknown
        assert "beyond the window" in verdict.note


def test_strong_witness_is_monotone_in_budget(S, closure_S):
    X = principal(S, parse_word(S, "b x[0]"))
    hs = reduce_to_domain(S, X, [parse_hull(S, "a")])
    statuses = [strong_regularity_witness(S, X, [], hs, closure_S, budget).status.value
                for budget in (1, 2, 3, 5, 10, 50, 500)]
    assert statuses[-1] == "holds"
    first = statuses.index("holds")
    assert set(statuses[first:]) == {"holds"}


class TestGeneratedInstances:
    def test_choices_outside_the_domain_are_skipped(self, S, closure_S):
        workflow = RegularityWorkflow(S, closure_S)
        instances = workflow.condition1_instances(limit=50)
        assert workflow.skipped_instances > 0
        for X, hs in instances:
            assert condition1_check(S, X, hs, closure_S).holds

    def test_conjugates_are_not_total_on_S(self, S, closure_S):
        X = GeneralizedIdeal(principal(S, ()))
        hs = reduce_to_domain(S, X, [parse_hull(S, "a^-1 b a")])
        with pytest.raises(InvalidInstance):
            condition1_check(S, X, hs, closure_S)


class TestSufficientConditions:
    @pytest.mark.parametrize("name", ["S", "T"])
    def test_none_applies_to_the_corpus_monoids(self, request, name):
        p = request.getfixturevalue(name)
        closure = request.getfixturevalue(f"closure_{name}")
        verdict = sufficient_conditions_check(p, closure, BUDGET)
        assert verdict.unknown
        assert verdict.note.startswith("none of the sufficient conditions applies")
        assert verdict.certificate["hausdorff"]["status"] == "fails"
        assert verdict.certificate["group_embeddable"]["status"] == "fails"
        assert verdict.certificate["group_embeddable"]["certificate"]["side"] == "right"
        assert verdict.certificate["finitely_aligned"]["status"] == "fails"

    def test_free_monoid_is_group_embeddable(self, free2):
        closure = IdealSemilattice(free2, trunc(3, 0, 0)).close(500)
        verdict = sufficient_conditions_check(free2, closure, BUDGET)
        assert verdict.holds
        assert verdict.witness == ["hausdorff", "group_embeddable", "finitely_aligned"]
        assert verdict.certificate["hausdorff"]["note"] == "implied by group embeddability"
