"""
Tests for bounded left cancellativity and exact left division.
"""
import pytest
from hypothesis import given, settings, strategies as st

from conftest import trunc, w
from monoid_functions import IndexWindow, Letter, normalize, parse_presentation, parse_word
from utils.cancellativity import (
    check_left_cancellative,
    check_right_cancellative,
    divides,
    equivalence_class,
    family_member,
    left_divides,
)


class TestCheckLeftCancellative:
    def test_S(self, S):
        verdict = check_left_cancellative(S, 4, IndexWindow(-2, 2))
        assert verdict.holds
        assert verdict.note == "verified up to radius 4"

    def test_T(self, T):
        assert check_left_cancellative(T, 4, IndexWindow(-1, 1)).holds

    def test_free_monoid(self, free2):
        assert check_left_cancellative(free2, 4, IndexWindow(0, 0)).holds

    def test_counterexample(self, left_absorbing):
        verdict = check_left_cancellative(left_absorbing, 3, IndexWindow(0, 0))
        assert verdict.fails
        assert verdict.witness == (Letter('a'), w('b'), w('c'))
        assert verdict.certificate["counterexample"] == ["a", "b", "c"]


class TestDivision:
    def test_equivalence_class(self, S):
        words, exact = equivalence_class(S, parse_word(S, "b y[1]"), 12)
        assert exact
        assert words == {parse_word(S, "b y[1]"), parse_word(S, "a b y[0]")}

    def test_cofactor(self, S):
        verdict = left_divides(S, w('a'), parse_word(S, "b x[0]"), 12)
        assert verdict.holds
        assert verdict.certificate["cofactor"] == "b x[0]"

    def test_shifted_cofactor(self, S):
        assert divides(S, w('a'), parse_word(S, "b y[1]"), 12) == parse_word(S, "b y[0]")
        assert divides(S, w('b'), parse_word(S, "b y[1]"), 12) == parse_word(S, "y[1]")

    def test_disjoint_families(self, S):
        assert divides(S, w(('x', 0)), w(('y', 0)), 12) is None
        assert left_divides(S, w(('x', 0)), w(('y', 0)), 12).fails

    def test_every_word_divides_by_e(self, S):
        word = parse_word(S, "a b x[2]")
        assert divides(S, (), word, 12) == normalize(S, word)

    def test_family_member(self, S):
        assert family_member(S, parse_word(S, "y[3] a"), ('x', 'y'), 12)
        assert not family_member(S, parse_word(S, "b x[0]"), ('x', 'y'), 12)


ball = trunc(3, -1, 1)


@pytest.mark.parametrize("name", ["S", "T"])
def test_left_multiplication_is_injective(request, name):
    p = request.getfixturevalue(name)
    words = ball.ball(p)
    for x in p.letters(ball.window):
        images = {normalize(p, (x,) + word) for word in words}
        assert len(images) == len(words)


@given(st.sampled_from(['a', 'b']), st.integers(min_value=-3, max_value=3))
@settings(max_examples=30, deadline=None)
def test_divides_recovers_cofactor(S, letter, n):
    """s | s·u with cofactor u for u in normal form."""
    u = w('b', ('y', n))
    product = normalize(S, w(letter) + u)
    cofactor = divides(S, w(letter), product, 12)
    assert normalize(S, w(letter) + cofactor) == product


CASCADE = "letters: a, b, c, d, f\nrules:\n  a b -> c\n  c d -> f\n"


class TestCascadingRules:
    """A right side that starts another left side needs more than one reverse step."""

    @pytest.fixture(scope="class")
    def cascade(self):
        return parse_presentation(CASCADE, name="cascade")

    def test_not_single_step(self, cascade):
        assert cascade.length_reducing
        assert not cascade.rhs_inert

    def test_cofactor_found_through_two_rules(self, cascade):
        assert normalize(cascade, w('a', 'b', 'd')) == w('f')
        verdict = left_divides(cascade, w('a'), w('f'), 12)
        assert verdict.holds
        assert verdict.certificate["cofactor"] == "b d"

    def test_failure_only_after_saturation(self, cascade):
        words, exact = equivalence_class(cascade, w('f'), 12)
        assert exact
        assert words == {w('f'), w('c', 'd'), w('a', 'b', 'd')}
        assert left_divides(cascade, w('b'), w('f'), 12).fails

    def test_truncated_search_is_unknown(self, cascade):
        assert left_divides(cascade, w('b'), w('f'), 1).unknown


def test_corpus_right_sides_are_inert(S, T, left_absorbing):
    assert S.rhs_inert and T.rhs_inert and left_absorbing.rhs_inert
    assert S.length_reducing and T.length_reducing
    assert not left_absorbing.length_reducing


class TestCheckRightCancellative:
    def test_S_absorbs_a_on_the_left_of_b_x(self, S):
        verdict = check_right_cancellative(S, 3, IndexWindow(0, 0))
        assert verdict.fails
        x, first, second = verdict.witness
        assert normalize(S, first + (x,)) == normalize(S, second + (x,))
        assert first != second

    def test_free_monoid(self, free2):
        assert check_right_cancellative(free2, 4, IndexWindow(0, 0)).holds


@pytest.mark.parametrize("name", ["S", "T", "left_absorbing"])
def test_cancel_check_is_monotone_in_radius(request, name):
    p = request.getfixturevalue(name)
    statuses = [check_left_cancellative(p, radius, IndexWindow(0, 0)).status.value for radius in range(1, 5)]
    if "fails" in statuses:
        assert set(statuses[statuses.index("fails"):]) == {"fails"}


S_LETTERS = [Letter('a'), Letter('b'), Letter('x', 0), Letter('y', 0), Letter('y', 1)]


@given(st.sampled_from([w('a'), w('b'), w('a', 'b')]),
       st.lists(st.sampled_from(S_LETTERS), max_size=4).map(tuple),
       st.sampled_from(S_LETTERS))
@settings(max_examples=50, deadline=None)
def test_divisibility_survives_right_multiplication(S, s, word, letter):
    if left_divides(S, s, normalize(S, word), 12).holds:
        extended = normalize(S, word + (letter,))
        verdict = left_divides(S, s, extended, 12)
        assert verdict.holds
        assert normalize(S, s + verdict.witness) == extended
