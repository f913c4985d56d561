"""
Left Inverse Hull
-----------------
Zigzags s_1^{-1} t_1 ... s_n^{-1} t_n as partial bijections of the monoid:
canonical forms, composition, inversion and the partial action on words.

Idempotent factors met while simplifying are moved to the right end of the
zigzag and kept as deferred domain tests (h_1 p_J h_2 = h_1 h_2 p_{h_2^{-1}J}).
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple

from monoid_functions import (
    DivisionUnknown,
    Presentation,
    Truncation,
    Word,
    WordSyntaxError,
    format_word,
    normalize,
    parse_word,
)
from utils.cancellativity import divides

logger = logging.getLogger('hull')


class FactorKind(str, Enum):
    WORD = 'word'
    INVERSE = 'inverse'
    IDEMPOTENT = 'idempotent'


@dataclass(frozen=True)
class Factor:
    kind: FactorKind
    word: Word = ()
    domain: Any = None  # an ideal with .contains(p, w, bound), for IDEMPOTENT factors


@dataclass(frozen=True)
class DeferredIdempotent:
    """Restriction to {w : through(w) is defined and lies in prefix·S (or in domain)}."""
    through: Tuple[Factor, ...]
    prefix: Optional[Word] = None
    domain: Any = None


@dataclass(frozen=True)
class HullElement:
    factors: Tuple[Factor, ...] = ()
    deferred: Tuple[DeferredIdempotent, ...] = ()
    is_zero: bool = False
    contractions: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def is_identity(self) -> bool:
        return not self.factors and not self.deferred and not self.is_zero

    @property
    def depth(self) -> int:
        """Letters multiplied on the left along the zigzag; bounds growth of word length."""
        return sum(len(f.word) for f in self.factors if f.kind is FactorKind.WORD)

    def __str__(self) -> str:
        return format_hull(self)


IDENTITY = HullElement()
ZERO = HullElement(is_zero=True)


def _common_prefix(u: Word, v: Word) -> int:
    k = 0
    while k < min(len(u), len(v)) and u[k] == v[k]:
        k += 1
    return k


def _common_suffix(u: Word, v: Word) -> int:
    k = 0
    while k < min(len(u), len(v)) and u[-1 - k] == v[-1 - k]:
        k += 1
    return k


def _try_divides(p: Presentation, s: Word, w: Word, bound: int) -> Optional[Word]:
    try:
        return divides(p, s, w, bound)
    except DivisionUnknown:
        return None


def _merge(p: Presentation, left: Factor, right: Factor, rest: Sequence[Factor],
           deferred: List[DeferredIdempotent], contractions: List[str], bound: int) -> Optional[List[Factor]]:
    """Simplify the adjacent pair left·right, or return None when it is already reduced."""
    if left.kind is FactorKind.WORD and right.kind is FactorKind.WORD:
        return [Factor(FactorKind.WORD, normalize(p, left.word + right.word))]

    if left.kind is FactorKind.INVERSE and right.kind is FactorKind.INVERSE:
        # s1^{-1} s2^{-1} = (s2 s1)^{-1}
        return [Factor(FactorKind.INVERSE, normalize(p, right.word + left.word))]

    if left.kind is FactorKind.INVERSE and right.kind is FactorKind.WORD:
        s, t = left.word, right.word
        u = _try_divides(p, s, t, bound)
        if u is not None:
            contractions.append(f"{format_word(s)}^-1 {format_word(t)} -> {format_word(u)}")
            return [Factor(FactorKind.WORD, u)]
        v = _try_divides(p, t, s, bound)
        if v is not None:
            contractions.append(f"{format_word(s)}^-1 {format_word(t)} -> ({format_word(v)})^-1")
            return [Factor(FactorKind.INVERSE, v)]
        k = _common_prefix(s, t)
        if k:
            return [Factor(FactorKind.INVERSE, s[k:]), Factor(FactorKind.WORD, t[k:])]
        return None

    if left.kind is FactorKind.WORD and right.kind is FactorKind.INVERSE:
        t, s = left.word, right.word
        k = _common_suffix(t, s)
        if not k:
            return None
        # t' c c^{-1} s'^{-1} = t' p_{cS} s'^{-1}; the projection moves to the right end
        shortened = Factor(FactorKind.INVERSE, s[:-k])
        through = ((shortened,) if shortened.word else ()) + tuple(rest)
        deferred.append(DeferredIdempotent(through, prefix=t[-k:]))
        contractions.append(f"{format_word(t[-k:])} {format_word(t[-k:])}^-1 -> p[{format_word(t[-k:])}S]")
        return [Factor(FactorKind.WORD, t[:-k]), shortened]

    return None


def _canonicalize(p: Presentation, factors: Sequence[Factor], deferred: Sequence[DeferredIdempotent],
                  is_zero: bool, bound: int) -> HullElement:
    if is_zero:
        return ZERO
    deferred = list(deferred)
    contractions: List[str] = []
    work = [f if f.kind is FactorKind.IDEMPOTENT else Factor(f.kind, normalize(p, f.word)) for f in factors]

    changed = True
    while changed:
        changed = False
        work = [f for f in work if f.kind is FactorKind.IDEMPOTENT or f.word]
        for i, f in enumerate(work):
            if f.kind is FactorKind.IDEMPOTENT:
                deferred.append(DeferredIdempotent(tuple(work[i + 1:]), domain=f.domain))
                del work[i]
                changed = True
                break
        if changed:
            continue
        for i in range(len(work) - 1):
            replacement = _merge(p, work[i], work[i + 1], work[i + 2:], deferred, contractions, bound)
            if replacement is not None:
                work[i:i + 2] = replacement
                changed = True
                break

    unique = tuple(dict.fromkeys(deferred))
    return HullElement(tuple(work), unique, False, tuple(contractions))


def make_hull(p: Presentation, zigzag: Sequence[Word], bound: int = 12) -> HullElement:
    """
    Build t_0 s_1^{-1} t_1 ... s_n^{-1} t_n from the alternating list [t_0, s_1, t_1, ...].

    Any entry may be the empty word.
    """
    factors = []
    for i, word in enumerate(zigzag):
        kind = FactorKind.WORD if i % 2 == 0 else FactorKind.INVERSE
        factors.append(Factor(kind, tuple(word)))
    return _canonicalize(p, factors, (), False, bound)


def from_factors(p: Presentation, factors: Sequence[Factor], bound: int = 12) -> HullElement:
    return _canonicalize(p, factors, (), False, bound)


def letter_element(p: Presentation, word: Word) -> HullElement:
    return _canonicalize(p, [Factor(FactorKind.WORD, word)], (), False, 0)


def idempotent(p: Presentation, domain: Any) -> HullElement:
    """The projection p_J onto an ideal J."""
    return _canonicalize(p, [Factor(FactorKind.IDEMPOTENT, domain=domain)], (), False, 0)


def compose(p: Presentation, h1: HullElement, h2: HullElement, bound: int = 12) -> HullElement:
    """h1 ∘ h2, i.e. apply h2 first."""
    if h1.is_zero or h2.is_zero:
        return ZERO
    # p_{D1} F2 = F2 p_{F2^{-1} D1}
    moved = [DeferredIdempotent(d.through + h2.factors, d.prefix, d.domain) for d in h1.deferred]
    return _canonicalize(p, h1.factors + h2.factors, moved + list(h2.deferred), False, bound)


def _invert_factors(factors: Sequence[Factor]) -> Tuple[Factor, ...]:
    flipped = []
    for f in reversed(factors):
        if f.kind is FactorKind.WORD:
            flipped.append(Factor(FactorKind.INVERSE, f.word))
        elif f.kind is FactorKind.INVERSE:
            flipped.append(Factor(FactorKind.WORD, f.word))
        else:
            flipped.append(f)
    return tuple(flipped)


def invert(p: Presentation, h: HullElement, bound: int = 12) -> HullElement:
    if h.is_zero:
        return ZERO
    inverse = _invert_factors(h.factors)
    # (F p_D)^{-1} = p_D F^{-1} = F^{-1} p_{F D}
    moved = [DeferredIdempotent(d.through + inverse, d.prefix, d.domain) for d in h.deferred]
    return _canonicalize(p, inverse, moved, False, bound)


def _apply_factors(p: Presentation, factors: Sequence[Factor], w: Word, bound: int) -> Optional[Word]:
    for f in reversed(factors):
        if f.kind is FactorKind.WORD:
            w = normalize(p, f.word + w)
        elif f.kind is FactorKind.INVERSE:
            w = divides(p, f.word, w, bound)
            if w is None:
                return None
        elif not f.domain.contains(p, w, bound):
            return None
    return w


def in_domain(p: Presentation, h: HullElement, w: Word, bound: int) -> bool:
    return apply(p, h, w, bound) is not None


def apply(p: Presentation, h: HullElement, w: Word, bound: int) -> Optional[Word]:
    """
    Evaluate h on w right to left; None when w is outside dom h.

    Raises:
        DivisionUnknown: a division step could not be decided
    """
    if h.is_zero:
        return None
    w = normalize(p, w)
    for d in h.deferred:
        image = _apply_factors(p, d.through, w, bound)
        if image is None:
            return None
        if d.prefix is not None:
            if divides(p, d.prefix, image, bound) is None:
                return None
        elif not d.domain.contains(p, image, bound):
            return None
    return _apply_factors(p, h.factors, w, bound)


def fixed_points(p: Presentation, h: HullElement, truncation: Truncation,
                 bound: int) -> Tuple[FrozenSet[Word], Tuple[Word, ...]]:
    """Ball words fixed by h, and the ball words whose evaluation was undecided."""
    fixed = []
    undecided = []
    for w in truncation.ball(p):
        try:
            if apply(p, h, w, bound) == w:
                fixed.append(w)
        except DivisionUnknown:
            undecided.append(w)
    if undecided:
        logger.debug(f"{len(undecided)} ball words undecided for {format_hull(h)}")
    return frozenset(fixed), tuple(undecided)


def equal_on_ball(p: Presentation, h1: HullElement, h2: HullElement, truncation: Truncation, bound: int) -> bool:
    """Same domain trace and same images on the ball ("equal up to radius r")."""
    return all(apply(p, h1, w, bound) == apply(p, h2, w, bound) for w in truncation.ball(p))


def zero_on_ball(p: Presentation, h: HullElement, truncation: Truncation, bound: int) -> bool:
    return all(apply(p, h, w, bound) is None for w in truncation.ball(p))


def idempotent_on_ball(p: Presentation, h: HullElement, truncation: Truncation, bound: int) -> bool:
    """h restricts the identity on the ball, i.e. acts as some p_X there."""
    return all(apply(p, h, w, bound) in (w, None) for w in truncation.ball(p))


# --- Text form ------------------------------------------------------------------------

_HULL_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*(?:\[[^\]]*\])?|0)(\^-1)?")


def _bracket_end(text: str, start: int) -> int:
    depth = 0
    for i in range(start, len(text)):
        if text[i] == '[':
            depth += 1
        elif text[i] == ']':
            depth -= 1
            if depth == 0:
                return i
    raise WordSyntaxError(f"unbalanced brackets in '{text}'")


def parse_hull(p: Presentation, text: str, bound: int = 12) -> HullElement:
    """
    Parse zigzag syntax such as ``b^-1 a``, ``a^-1 b``, ``p[bS] a`` or ``0``.

    ``^-1`` inverts the whole token it is attached to; ``e`` is the identity.
    """
    from utils.ideals import parse_ideal

    factors: List[Factor] = []
    zero = False
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        if text.startswith('p[', pos) and 'p' not in p.alphabet:
            end = _bracket_end(text, pos + 1)
            factors.append(Factor(FactorKind.IDEMPOTENT, domain=parse_ideal(p, text[pos + 2:end])))
            pos = end + 1
            continue
        match = _HULL_TOKEN.match(text, pos)
        if not match:
            raise WordSyntaxError(f"cannot parse hull element '{text}' at position {pos + 1}")
        token, inverse = match.group(1), match.group(2)
        pos = match.end()
        if token == '0':
            zero = True
        elif token == 'e' and 'e' not in p.alphabet:
            continue
        else:
            kind = FactorKind.INVERSE if inverse else FactorKind.WORD
            factors.append(Factor(kind, parse_word(p, token)))
    return _canonicalize(p, factors, (), zero, bound)


def _format_factor(f: Factor) -> str:
    if f.kind is FactorKind.WORD:
        return format_word(f.word)
    if f.kind is FactorKind.INVERSE:
        inner = format_word(f.word)
        return f"{inner}^-1" if len(f.word) == 1 else f"({inner})^-1"
    return f"p[{f.domain.describe()}]"


def _format_deferred(d: DeferredIdempotent) -> str:
    target = f"{format_word(d.prefix)}S" if d.prefix is not None else d.domain.describe()
    if not d.through:
        return f"p[{target}]"
    through = " ".join(_format_factor(f) for f in d.through)
    return f"p[({through})^-1 {target}]"


def format_hull(h: HullElement) -> str:
    if h.is_zero:
        return "0"
    parts = [_format_factor(f) for f in h.factors] + [_format_deferred(d) for d in h.deferred]
    return " ".join(parts) if parts else "e"
