"""
Tests for canonical zigzags, composition, inversion and the partial action.
"""
import pytest
from hypothesis import given, settings, strategies as st

from conftest import trunc, w
from monoid_functions import WordSyntaxError, normalize, parse_word
from utils.hull import (
    IDENTITY,
    ZERO,
    apply,
    compose,
    equal_on_ball,
    fixed_points,
    format_hull,
    idempotent_on_ball,
    invert,
    letter_element,
    make_hull,
    parse_hull,
)

BOUND = 12


class TestCanonicalForm:
    def test_conjugate(self, S):
        h = make_hull(S, [(), w('b'), w('a', 'b')])
        assert format_hull(h) == "b^-1 a b"
        assert h == parse_hull(S, "b^-1 a b")

    def test_inverse_pair_cancels(self, S):
        a = letter_element(S, w('a'))
        assert compose(S, invert(S, a), a).is_identity

    def test_word_then_inverse_defers_projection(self, S):
        a = letter_element(S, w('a'))
        h = compose(S, a, invert(S, a))
        assert format_hull(h) == "p[aS]"
        assert apply(S, h, parse_word(S, "a b"), BOUND) == parse_word(S, "a b")
        assert apply(S, h, w('b'), BOUND) is None
        assert idempotent_on_ball(S, h, trunc(3, 0, 0), BOUND)

    def test_division_in_zigzag(self, S):
        h = parse_hull(S, "a^-1 a b")
        assert format_hull(h) == "b"

    def test_parse_special_forms(self, S):
        assert parse_hull(S, "0") == ZERO
        assert parse_hull(S, "e") == IDENTITY
        assert format_hull(invert(S, letter_element(S, parse_word(S, "b x[0]")))) == "(b x[0])^-1"

    def test_parse_error(self, S):
        with pytest.raises(WordSyntaxError):
            parse_hull(S, "a ^ b")


class TestAction:
    def test_letter(self, S):
        a = letter_element(S, w('a'))
        assert apply(S, a, parse_word(S, "b y[0]"), BOUND) == parse_word(S, "b y[1]")
        assert apply(S, a, parse_word(S, "b x[0]"), BOUND) == parse_word(S, "b x[0]")

    def test_inverse_is_partial(self, S):
        a_inv = invert(S, letter_element(S, w('a')))
        assert apply(S, a_inv, parse_word(S, "b y[1]"), BOUND) == parse_word(S, "b y[0]")
        assert apply(S, a_inv, w('b'), BOUND) is None

    def test_conjugate_fixes_x_family(self, S):
        h = parse_hull(S, "b^-1 a b")
        assert apply(S, h, w(('x', 0)), BOUND) == w(('x', 0))
        assert apply(S, h, w(('y', 0)), BOUND) == w(('y', 1))

    def test_fixed_points(self, S):
        fixed, undecided = fixed_points(S, letter_element(S, w('a')), trunc(3, 0, 0), BOUND)
        assert not undecided
        assert parse_word(S, "b x[0]") in fixed
        assert parse_word(S, "b y[0]") not in fixed

    def test_zero(self, S):
        assert apply(S, ZERO, w('a'), BOUND) is None


POOL = ["e", "a", "b", "a^-1", "b^-1", "x[0]", "y[0]^-1", "b^-1 a b", "a a^-1"]


@given(st.sampled_from(POOL), st.sampled_from(POOL))
@settings(max_examples=40, deadline=None)
def test_compose_is_composition_of_maps(S, first, second):
    h1, h2 = parse_hull(S, first), parse_hull(S, second)
    product = compose(S, h1, h2)
    for word in trunc(2, 0, 0).ball(S):
        middle = apply(S, h2, word, BOUND)
        expected = None if middle is None else apply(S, h1, middle, BOUND)
        assert apply(S, product, word, BOUND) == expected


@given(st.sampled_from(POOL))
@settings(max_examples=20, deadline=None)
def test_inverse_undoes_action(S, text):
    h = parse_hull(S, text)
    h_inv = invert(S, h)
    for word in trunc(2, 0, 0).ball(S):
        image = apply(S, h, word, BOUND)
        if image is not None:
            assert apply(S, h_inv, image, BOUND) == word


SMALL_BALL = trunc(2, 0, 0)


@given(st.sampled_from(POOL))
@settings(max_examples=20, deadline=None)
def test_double_inverse_is_the_element(S, text):
    h = parse_hull(S, text)
    assert equal_on_ball(S, invert(S, invert(S, h)), h, SMALL_BALL, BOUND)


@given(st.sampled_from(POOL))
@settings(max_examples=20, deadline=None)
def test_action_is_injective_on_the_domain(S, text):
    h = parse_hull(S, text)
    images = {}
    for word in SMALL_BALL.ball(S):
        image = apply(S, h, word, BOUND)
        if image is not None:
            assert images.setdefault(image, word) == word


@given(st.sampled_from(POOL), st.sampled_from(POOL), st.sampled_from(POOL))
@settings(max_examples=40, deadline=None)
def test_compose_is_associative(S, first, second, third):
    h1, h2, h3 = (parse_hull(S, text) for text in (first, second, third))
    left = compose(S, compose(S, h1, h2), h3)
    right = compose(S, h1, compose(S, h2, h3))
    assert equal_on_ball(S, left, right, SMALL_BALL, BOUND)


@given(st.sampled_from(POOL), st.sampled_from(["a", "b", "x[0]", "y[0]"]))
@settings(max_examples=40, deadline=None)
def test_action_commutes_with_right_multiplication(S, text, letter):
    h = parse_hull(S, text)
    s = parse_word(S, letter)
    for word in SMALL_BALL.ball(S):
        image = apply(S, h, word, BOUND)
        if image is not None:
            assert apply(S, h, normalize(S, word + s), BOUND) == normalize(S, image + s)
