"""
Tests for constructible right ideals: parsing, membership, symbolic
operations, the fingerprinted closure and finite-alignment evidence.
"""
import re

import pytest
from hypothesis import given, settings, strategies as st

from conftest import trunc, w
from monoid_functions import IndexWindow, Letter, WordSyntaxError, parse_word
from utils.ideals import (
    EMPTY_IDEAL,
    WHOLE,
    IdealSemilattice,
    family,
    finite_alignment_report,
    ideals_containing,
    membership,
    parse_generalized,
    parse_ideal,
    principal,
    semilattice_closure,
)

BOUND = 12


class TestParseIdeal:
    @pytest.mark.parametrize("text, description", [
        ("S", "S"),
        ("Empty", "Empty"),
        ("Principal(b)", "Principal(b)"),
        ("bS", "Principal(b)"),
        ("Family(b)", "Family(b)"),
        ("Family(e)", "Family(e)"),
        ("Principal(a a b y[0])", "Principal(b y[2])"),
    ])
    def test_forms(self, S, text, description):
        assert parse_ideal(S, text).describe() == description

    def test_generalized(self, S):
        region = parse_generalized(S, "Family(b) \\ Principal(b x[0])")
        assert region.describe() == "Family(b) \\ Principal(b x[0])"
        assert region.contains(S, parse_word(S, "b y[0]"), BOUND)
        assert not region.contains(S, parse_word(S, "b x[0] a"), BOUND)

    def test_family_needs_indexed_letters(self, free2):
        with pytest.raises(WordSyntaxError):
            parse_ideal(free2, "Family(a)")

    def test_garbage(self, S):
        with pytest.raises(WordSyntaxError):
            parse_ideal(S, "Union(a, b)")


class TestMembership:
    def test_principal(self, S):
        assert principal(S, w('a')).contains(S, parse_word(S, "b x[3]"), BOUND)
        assert principal(S, w('a')).contains(S, parse_word(S, "b y[3]"), BOUND)
        assert not principal(S, w('a')).contains(S, w('b'), BOUND)

    def test_family(self, S):
        assert family(S, w('b')).contains(S, parse_word(S, "b x[7] a"), BOUND)
        assert not family(S, w('b')).contains(S, w('b', 'a'), BOUND)
        assert membership(S, family(S, ()), w('b'), BOUND).fails

    def test_extremes(self, S):
        assert WHOLE.contains(S, w('a', 'b'), BOUND)
        assert not EMPTY_IDEAL.contains(S, (), BOUND)


class TestOperations:
    @pytest.fixture()
    def lattice(self, S):
        return IdealSemilattice(S, trunc(3, 0, 0))

    def test_preimage_of_aS_under_b(self, lattice, S):
        assert lattice.preimage(Letter('b'), principal(S, w('a'))).describe() == "Family(e)"

    def test_empty_preimage(self, lattice, S):
        assert lattice.preimage(Letter('a'), principal(S, w('b', 'a'))).describe() == "Empty"

    def test_divisible_preimage(self, lattice, S):
        assert lattice.preimage(Letter('a'), principal(S, parse_word(S, "b y[1]"))).describe() == "Principal(b y[0])"

    def test_translate(self, lattice, S):
        assert lattice.translate(w('a'), family(S, w('b'))) == family(S, w('a', 'b'))
        assert lattice.translate(w('a'), principal(S, w('b', ('y', 0)))).describe() == "Principal(b y[1])"

    def test_intersection_is_a_family(self, lattice, S):
        meet = lattice.intersect(principal(S, w('b')), principal(S, w('a')))
        assert meet.describe() == "Family(b)"

    def test_disjoint_letters(self, lattice, S):
        meet = lattice.intersect(principal(S, w(('x', 0))), principal(S, w(('y', 0))))
        assert meet.describe() == "Empty"

    def test_comparable_principals(self, lattice, S):
        meet = lattice.intersect(principal(S, w('a')), principal(S, w('a', 'a')))
        assert meet.describe() == "Principal(a a)"

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bS_meets_powers_of_a_in_the_family(self, S, k):
        lattice = IdealSemilattice(S, trunc(3, -1, 1))
        fp = lattice.fingerprint(principal(S, w('b'))) & lattice.fingerprint(principal(S, w(*['a'] * k)))
        assert fp == lattice.fingerprint(family(S, w('b')))


class TestClosure:
    def test_S_saturates_with_three_shapes(self, closure_S):
        assert closure_S.saturated
        assert set(closure_S.shapes()) <= {"empty", "principal", "family"}

    def test_T_saturates_with_three_shapes(self, closure_T):
        assert closure_T.saturated
        assert set(closure_T.shapes()) <= {"empty", "principal", "family"}

    def test_table_matches_fingerprints(self, closure_S):
        fps = closure_S.fingerprints
        for (i, j), k in closure_S.table.items():
            assert fps[k] == fps[i] & fps[j]

    def test_representatives_have_distinct_fingerprints(self, closure_S):
        assert len(set(closure_S.fingerprints)) == len(closure_S)

    def test_family_beats_long_principal(self, closure_S, S):
        k = closure_S.index_of(family(S, w('b')))
        assert closure_S.representatives[k] == family(S, w('b'))

    def test_to_dict(self, closure_S):
        data = closure_S.to_dict()
        assert data["saturated"] is True
        assert data["up_to_radius"] == 3
        assert data["representatives"][0]["description"] == "S"

    def test_budget_exhaustion(self, S):
        small = semilattice_closure(S, 5, 3, IndexWindow(0, 0))
        assert small.exhausted
        assert not small.saturated

    @given(st.data())
    @settings(max_examples=30, deadline=None)
    def test_semilattice_laws(self, closure_S, data):
        n = len(closure_S)
        i, j, k = (data.draw(st.integers(min_value=0, max_value=n - 1)) for _ in range(3))
        table = closure_S.table
        assert table[(i, j)] == table[(j, i)]
        assert table[(i, i)] == i
        assert table[(table[(i, j)], k)] == table[(i, table[(j, k)])]


PRINCIPAL_POWERS = r"Principal\(a( a)*\)"


class TestContaining:
    def test_two_x_words_in_S(self, S):
        closure = semilattice_closure(S, 2000, 3, IndexWindow(1, 2))
        found = {ideal.describe() for ideal in ideals_containing([parse_word(S, "b x[1]"), parse_word(S, "b x[2]")],
                                                                 closure)}
        assert {"S", "Principal(b)", "Principal(a b)", "Principal(a a b)", "Family(b)"} <= found
        allowed = re.compile(rf"^(S|Family\(b\)|Principal\((a )*b\)|{PRINCIPAL_POWERS})$")
        assert all(allowed.match(name) for name in found), found

    def test_y_word_in_S(self, S):
        closure = semilattice_closure(S, 500, 3, IndexWindow(3, 3))
        found = {ideal.describe() for ideal in ideals_containing([parse_word(S, "y[3]")], closure)}
        assert found == {"S", "Principal(y[3])", "Family(e)"}

    def test_T(self, T, closure_T):
        found = {ideal.describe() for ideal in ideals_containing([parse_word(T, "b x[0]"), parse_word(T, "b y[0]")],
                                                                 closure_T)}
        assert {"S", "Principal(b)", "Principal(a)", "Principal(c)", "Principal(c a b)", "Family(b)"} <= found
        allowed = re.compile(r"^(S|Family\(b\)|Principal\(([ac] )*b\)|Principal\([ac]( [ac])*\))$")
        assert all(allowed.match(name) for name in found), found


class TestFiniteAlignment:
    @pytest.mark.parametrize("width, count", [(1, 6), (2, 10), (3, 14)])
    def test_S_counts_grow_with_window(self, S, width, count):
        report = finite_alignment_report(S, trunc(3, -width, width), pairs=[(w('a'), w('b'))])
        row = report["pairs"][0]
        assert row["count"] == count
        assert row["count_widened"] == count + 4
        assert row["grows"]
        assert not report["finitely_aligned_evidence"]

    def test_free_monoid(self, free2):
        report = finite_alignment_report(free2, trunc(3, 0, 0))
        assert report["max_count"] == 0
        assert report["finitely_aligned_evidence"]

    def test_disjoint_families(self, S):
        report = finite_alignment_report(S, trunc(3, 0, 0), pairs=[(w(('x', 0)), w(('y', 0)))])
        assert report["pairs"][0]["count"] == 0
