"""
Left Cancellativity and Divisibility
------------------------------------
Bounded verification of left cancellativity and exact left division
s^{-1}w through per-word quotient tables.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from constants import CONFLUENCE_WINDOW_MARGIN
from monoid_functions import (
    DivisionUnknown,
    IndexWindow,
    Letter,
    Presentation,
    Status,
    Verdict,
    Word,
    ball_words,
    format_word,
    is_locally_confluent,
    normalize,
    reverse_steps,
)
from utils.profiler import profile, track_hot_path

logger = logging.getLogger('cancellativity')


def _certified(p: Presentation, words: Iterable[Word]) -> bool:
    """Normal forms decide equivalence for words whose indices lie in ``words``' window."""
    window = IndexWindow.covering(words).widened(CONFLUENCE_WINDOW_MARGIN)
    return p.terminating and is_locally_confluent(p, window)


def equivalence_class(p: Presentation, w: Word, bound: int) -> Tuple[FrozenSet[Word], bool]:
    """
    Words reachable from nf(w) by reverse rewriting, and whether the set is complete
    for the purpose of reading off left quotients.

    When the rules are length-reducing and no left side starts inside a right
    side, one reverse step suffices: x·v with v normal has its redexes at the
    front and one rewrite leaves a normal word. Otherwise the backward search
    runs up to ``bound`` levels and is complete only when it saturates.
    """
    target = normalize(p, w)
    single_step = p.length_reducing and p.rhs_inert
    depth = 1 if single_step else bound
    key = (target, depth)
    table = p.cache['equivalence_class']
    if key in table:
        return table[key]

    track_hot_path('equivalence_class.miss')
    window = IndexWindow.covering([target]).widened(max(1, p.max_index_shift))
    seen = {target}
    layer = [target]
    for _ in range(depth):
        next_layer = []
        for word in layer:
            for previous in reverse_steps(p, word, window):
                if previous not in seen:
                    seen.add(previous)
                    next_layer.append(previous)
        layer = next_layer
        if not layer:
            break

    exact = _certified(p, [target])
    if not single_step:
        exact = exact and not layer
    table[key] = (frozenset(seen), exact)
    return table[key]


def left_quotients(p: Presentation, x: Letter, w: Word, bound: int) -> Tuple[FrozenSet[Word], bool]:
    """Normal forms v with x·v equivalent to w, plus an exactness flag."""
    words, exact = equivalence_class(p, w, bound)
    quotients = frozenset(normalize(p, u[1:]) for u in words if u and u[0] == x)
    return quotients, exact


def leading_letters(p: Presentation, w: Word, bound: int) -> Tuple[FrozenSet[Letter], bool]:
    words, exact = equivalence_class(p, w, bound)
    return frozenset(u[0] for u in words if u), exact


def divides(p: Presentation, s: Word, w: Word, bound: int) -> Optional[Word]:
    """
    Return a cofactor u with s·u equivalent to w, or None when no such u exists.

    The shortlex-smallest candidate is returned.

    Raises:
        DivisionUnknown: when no cofactor was found and the search was not exhaustive
    """
    candidates = {normalize(p, w)}
    exact = True
    for x in normalize(p, s):
        next_candidates = set()
        for c in candidates:
            quotients, complete = left_quotients(p, x, c, bound)
            next_candidates.update(quotients)
            exact = exact and complete
        candidates = next_candidates
        if not candidates:
            break
    if candidates:
        return min(candidates, key=p.word_key)
    if not exact:
        raise DivisionUnknown(f"cannot decide whether {format_word(s)} left-divides {format_word(w)} "
                              f"within bound {bound}")
    return None


def family_member(p: Presentation, w: Word, symbols: Iterable[str], bound: int) -> bool:
    """True when w lies in the union of z[n]S over the indexed families ``symbols``."""
    symbols = set(symbols)
    letters, exact = leading_letters(p, w, bound)
    if any(letter.symbol in symbols for letter in letters):
        return True
    if not exact:
        raise DivisionUnknown(f"cannot decide family membership of {format_word(w)} within bound {bound}")
    return False


def left_divides(p: Presentation, s: Word, w: Word, bound: int) -> Verdict:
    try:
        u = divides(p, s, w, bound)
    except DivisionUnknown as e:
        logger.debug(str(e))
        return Verdict(Status.UNKNOWN, {"bound": bound}, note=str(e))
    if u is None:
        return Verdict(Status.FAILS, {"divisor": format_word(s), "word": format_word(w)},
                       note=f"{format_word(w)} is not in {format_word(s)}S")
    return Verdict(Status.HOLDS, {"cofactor": format_word(u)}, witness=u)


@profile
def check_left_cancellative(p: Presentation, radius: int, window: IndexWindow) -> Verdict:
    """
    For every letter x, distinct ball words w, w' must have distinct nf(x·w), nf(x·w').

    A collision is a counterexample (x, w, w'); the shortest is reported.
    """
    certificate: Dict = {"radius": radius, "window": str(window)}
    if not p.terminating:
        return Verdict(Status.UNKNOWN, certificate, note="no termination certificate for the rules")
    confluence_window = window.widened(CONFLUENCE_WINDOW_MARGIN)
    if not is_locally_confluent(p, confluence_window):
        certificate["confluence_window"] = str(confluence_window)
        return Verdict(Status.UNKNOWN, certificate, note="critical pairs do not all join")

    words = ball_words(p, max(radius - 1, 0), window) if radius > 0 else ()
    counterexamples: List[Tuple[Letter, Word, Word]] = []
    for x in p.letters(window):
        seen: Dict[Word, Word] = {}
        for w in words:
            image = normalize(p, (x,) + w)
            first = seen.setdefault(image, w)
            if first != w:
                counterexamples.append((x, first, w))

    certificate["letters"] = len(p.letters(window))
    certificate["words_checked"] = len(words)
    if counterexamples:
        x, w1, w2 = min(counterexamples,
                        key=lambda c: (len(c[1]) + len(c[2]), p.letter_key(c[0]), p.word_key(c[1]), p.word_key(c[2])))
        logger.info(f"{p.name}: {format_word((x,) + w1)} ~ {format_word((x,) + w2)} with {format_word(w1)} != {format_word(w2)}")
        certificate["counterexample"] = [str(x), format_word(w1), format_word(w2)]
        return Verdict(Status.FAILS, certificate, witness=(x, w1, w2))
    return Verdict(Status.HOLDS, certificate, note=f"verified up to radius {radius}")


@profile
def check_right_cancellative(p: Presentation, radius: int, window: IndexWindow) -> Verdict:
    """Mirror of ``check_left_cancellative``: a collision nf(w·x) = nf(w'·x) with w != w'."""
    certificate: Dict = {"radius": radius, "window": str(window)}
    if not p.terminating:
        return Verdict(Status.UNKNOWN, certificate, note="no termination certificate for the rules")
    confluence_window = window.widened(CONFLUENCE_WINDOW_MARGIN)
    if not is_locally_confluent(p, confluence_window):
        certificate["confluence_window"] = str(confluence_window)
        return Verdict(Status.UNKNOWN, certificate, note="critical pairs do not all join")

    words = ball_words(p, max(radius - 1, 0), window) if radius > 0 else ()
    counterexamples: List[Tuple[Letter, Word, Word]] = []
    for x in p.letters(window):
        seen: Dict[Word, Word] = {}
        for w in words:
            first = seen.setdefault(normalize(p, w + (x,)), w)
            if first != w:
                counterexamples.append((x, first, w))

    certificate["words_checked"] = len(words)
    if counterexamples:
        x, w1, w2 = min(counterexamples,
                        key=lambda c: (len(c[1]) + len(c[2]), p.letter_key(c[0]), p.word_key(c[1]), p.word_key(c[2])))
        certificate["counterexample"] = [str(x), format_word(w1), format_word(w2)]
        return Verdict(Status.FAILS, certificate, witness=(x, w1, w2),
                       note=f"{format_word(w1 + (x,))} ~ {format_word(w2 + (x,))}")
    return Verdict(Status.HOLDS, certificate, note=f"verified up to radius {radius}")
