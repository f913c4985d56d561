"""
Constructible Right Ideals
--------------------------
Symbolic ideals (Empty, Principal(s) = sS, Family(s) = union of s z[n] S over
the indexed families, Opaque = domain of a hull element) with exact membership,
and a fingerprinted semilattice closure over a truncation.

Fingerprints are bitsets over the ball words; two ideals are "equal up to
radius r" when their fingerprints agree.
"""
import hashlib
import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from constants import CLOSURE_MAX_ROUNDS, FAMILY_SYMBOLS, IDEAL_SHAPES, UPGRADE_RADIUS_DROP
from monoid_functions import (
    DivisionUnknown,
    IndexWindow,
    Letter,
    Presentation,
    Status,
    Truncation,
    Verdict,
    Word,
    WordSyntaxError,
    format_word,
    normalize,
    parse_word,
)
from utils.cancellativity import divides, family_member
from utils.hull import HullElement, apply, compose, format_hull, idempotent, invert, letter_element
from utils.profiler import profile

logger = logging.getLogger('ideals')


class IdealShape(str, Enum):
    EMPTY = 'empty'
    PRINCIPAL = 'principal'
    FAMILY = 'family'
    OPAQUE = 'opaque'


SHAPE_RANK = {IdealShape.EMPTY: 0, IdealShape.PRINCIPAL: 1, IdealShape.FAMILY: 2, IdealShape.OPAQUE: 3}


def family_symbols(p: Presentation) -> Tuple[str, ...]:
    symbols = FAMILY_SYMBOLS or tuple(p.indexed_symbols)
    return tuple(s for s in symbols if p.alphabet.get(s))


@dataclass(frozen=True)
class ConstructibleIdeal:
    shape: IdealShape
    word: Word = ()
    hull: Optional[HullElement] = None
    symbols: Tuple[str, ...] = ()
    trace: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def is_whole(self) -> bool:
        return self.shape is IdealShape.PRINCIPAL and not self.word

    def contains(self, p: Presentation, w: Word, bound: int) -> bool:
        """
        Exact membership test.

        Raises:
            DivisionUnknown: a division step could not be decided within ``bound``
        """
        if self.shape is IdealShape.EMPTY:
            return False
        if self.shape is IdealShape.PRINCIPAL:
            return not self.word or divides(p, self.word, w, bound) is not None
        if self.shape is IdealShape.FAMILY:
            u = divides(p, self.word, w, bound)
            return u is not None and family_member(p, u, self.symbols, bound)
        return apply(p, self.hull, w, bound) is not None

    def describe(self) -> str:
        if self.shape is IdealShape.EMPTY:
            return "Empty"
        if self.is_whole:
            return "S"
        if self.shape is IdealShape.PRINCIPAL:
            return f"Principal({format_word(self.word)})"
        if self.shape is IdealShape.FAMILY:
            return f"Family({format_word(self.word)})"
        return f"Opaque({format_hull(self.hull)})"

    def __str__(self) -> str:
        return self.describe()


EMPTY_IDEAL = ConstructibleIdeal(IdealShape.EMPTY)
WHOLE = ConstructibleIdeal(IdealShape.PRINCIPAL)


def principal(p: Presentation, s: Word) -> ConstructibleIdeal:
    return ConstructibleIdeal(IdealShape.PRINCIPAL, normalize(p, s))


def family(p: Presentation, s: Word) -> ConstructibleIdeal:
    symbols = family_symbols(p)
    if not symbols:
        raise WordSyntaxError(f"{p.name} has no indexed family for Family({format_word(s)})")
    return ConstructibleIdeal(IdealShape.FAMILY, normalize(p, s), symbols=symbols)


def opaque(hull: HullElement, trace: Sequence[str] = ()) -> ConstructibleIdeal:
    """The ideal dom(hull)."""
    return ConstructibleIdeal(IdealShape.OPAQUE, hull=hull, trace=tuple(trace))


@dataclass(frozen=True)
class GeneralizedIdeal:
    """X minus the union of finitely many constructible ideals."""
    base: ConstructibleIdeal
    removed: Tuple[ConstructibleIdeal, ...] = ()

    def contains(self, p: Presentation, w: Word, bound: int) -> bool:
        return self.base.contains(p, w, bound) and not any(r.contains(p, w, bound) for r in self.removed)

    def describe(self) -> str:
        return " \\ ".join([self.base.describe()] + [r.describe() for r in self.removed])

    def __str__(self) -> str:
        return self.describe()


Ideal = Union[ConstructibleIdeal, GeneralizedIdeal]


def ideal_hull(p: Presentation, ideal: ConstructibleIdeal) -> HullElement:
    """The projection p_I as a hull element."""
    return idempotent(p, ideal)


def membership(p: Presentation, ideal: Ideal, w: Word, bound: int) -> Verdict:
    w = normalize(p, w)
    certificate = {"ideal": ideal.describe(), "word": format_word(w)}
    try:
        inside = ideal.contains(p, w, bound)
    except DivisionUnknown as e:
        return Verdict(Status.UNKNOWN, dict(certificate, bound=bound), note=str(e))
    return Verdict(Status.HOLDS if inside else Status.FAILS, certificate)


_CALL = re.compile(r"\s*(Principal|Family)\s*\((.*)\)\s*$", re.IGNORECASE)


def parse_ideal(p: Presentation, text: str) -> ConstructibleIdeal:
    """Parse ``S``, ``Empty``, ``0``, ``Principal(w)``, ``Family(w)`` or the shorthand ``bS``."""
    stripped = text.strip()
    if stripped == 'S' and 'S' not in p.alphabet:
        return WHOLE
    if stripped.lower() in ('empty', '0', '∅'):
        return EMPTY_IDEAL
    call = _CALL.match(stripped)
    if call:
        word = parse_word(p, call.group(2))
        return principal(p, word) if call.group(1).lower() == 'principal' else family(p, word)
    if stripped.endswith('S') and 'S' not in p.alphabet:
        return principal(p, parse_word(p, stripped[:-1]))
    raise WordSyntaxError(f"cannot parse ideal '{text}', expected S, Empty, Principal(w), Family(w) or wS")


def parse_generalized(p: Presentation, text: str, removed: Sequence[str] = ()) -> GeneralizedIdeal:
    """Parse ``X \\ Y \\ Z`` plus any extra removed ideals."""
    parts = [part for part in text.split('\\')]
    base = parse_ideal(p, parts[0])
    minus = tuple(parse_ideal(p, part) for part in list(parts[1:]) + list(removed))
    return GeneralizedIdeal(base, minus)


def _preference(ideal: ConstructibleIdeal, p: Presentation, radius: int) -> Tuple:
    """
    Order for choosing a representative among ideals with equal fingerprints.

    An ideal whose generators are longer than the radius is invisible to the
    ball (a^k S for large k looks like Family(b) in S) and ranks last.
    """
    generator_length = len(ideal.word) + (ideal.shape is IdealShape.FAMILY)
    return (ideal.shape is IdealShape.OPAQUE, generator_length > radius, SHAPE_RANK[ideal.shape],
            len(ideal.word), p.word_key(ideal.word))


class IdealSemilattice:
    """
    Tracked constructible ideals of one presentation at one truncation.

    Representatives are deduplicated by fingerprint; ``table`` maps a pair of
    representative indices to the index of their intersection.
    """

    def __init__(self, p: Presentation, truncation: Truncation, bound: int = 12):
        self.p = p
        self.truncation = truncation
        self.bound = bound
        self.ball = truncation.ball(p)
        self.index: Dict[Word, int] = {w: i for i, w in enumerate(self.ball)}
        self.full = (1 << len(self.ball)) - 1
        self.representatives: List[ConstructibleIdeal] = []
        self.fingerprints: List[int] = []
        self.table: Dict[Tuple[int, int], int] = {}
        self.saturated = False
        self.exhausted = False
        self.rounds = 0
        self._by_fingerprint: Dict[int, int] = {}
        self._fingerprint_cache: Dict[Any, int] = {}

    def __len__(self) -> int:
        return len(self.representatives)

    # --- fingerprints ---------------------------------------------------------------

    def fingerprint(self, ideal: Ideal) -> int:
        cached = self._fingerprint_cache.get(ideal)
        if cached is not None:
            return cached
        if isinstance(ideal, GeneralizedIdeal):
            fp = self.fingerprint(ideal.base)
            for removed in ideal.removed:
                fp &= ~self.fingerprint(removed)
        elif ideal.shape is IdealShape.EMPTY:
            fp = 0
        elif ideal.is_whole:
            fp = self.full
        else:
            fp = 0
            for i, w in enumerate(self.ball):
                # right ideal: a member prefix puts w in as well
                if w and (fp >> self.index[w[:-1]]) & 1:
                    fp |= 1 << i
                elif ideal.contains(self.p, w, self.bound):
                    fp |= 1 << i
        self._fingerprint_cache[ideal] = fp
        return fp

    def words_of(self, fp: int) -> List[Word]:
        return [w for i, w in enumerate(self.ball) if (fp >> i) & 1]

    def minimal_elements(self, fp: int) -> List[Word]:
        """Members of ``fp`` whose proper prefixes are not members."""
        return [w for i, w in enumerate(self.ball)
                if (fp >> i) & 1 and not (w and (fp >> self.index[w[:-1]]) & 1)]

    def fingerprint_hash(self, fp: int) -> str:
        return hashlib.sha256(f"{len(self.ball)}:{fp:x}".encode()).hexdigest()[:16]

    def tracked_hash(self) -> str:
        """Hash of the tracked list, carried by every report relative to it."""
        digest = hashlib.sha256()
        for ideal, fp in zip(self.representatives, self.fingerprints):
            digest.update(f"{ideal.describe()}:{fp:x};".encode())
        return digest.hexdigest()[:16]

    def probe_words(self) -> List[Word]:
        """The short part of the probe shell used by upgrades, covers and witness searches."""
        limit = max(self.truncation.radius - UPGRADE_RADIUS_DROP, 2)
        return [w for w in self.truncation.probe(self.p) if len(w) <= limit]

    def agrees_beyond_window(self, first: Ideal, second: Ideal) -> bool:
        return all(first.contains(self.p, w, self.bound) == second.contains(self.p, w, self.bound)
                   for w in self.probe_words())

    # --- upgrades -------------------------------------------------------------------

    def _candidates(self, fp: int) -> Iterator[ConstructibleIdeal]:
        if fp == 0:
            yield EMPTY_IDEAL
            return
        if fp == self.full:
            yield WHOLE
        minimal = self.minimal_elements(fp)
        symbols = family_symbols(self.p)
        seen = set()
        for shape in IDEAL_SHAPES:
            for m in minimal:
                if shape == 'principal':
                    candidate = ConstructibleIdeal(IdealShape.PRINCIPAL, m)
                elif shape == 'family' and m and m[-1].symbol in symbols:
                    candidate = ConstructibleIdeal(IdealShape.FAMILY, normalize(self.p, m[:-1]), symbols=symbols)
                else:
                    continue
                if candidate not in seen:
                    seen.add(candidate)
                    yield candidate

    def upgrade(self, ideal: ConstructibleIdeal, fp: Optional[int] = None) -> ConstructibleIdeal:
        """
        Replace an Opaque ideal by a symbolic one agreeing on the whole ball
        and on the probe shell; other ideals are returned unchanged.
        """
        if ideal.shape is not IdealShape.OPAQUE:
            return ideal
        fp = self.fingerprint(ideal) if fp is None else fp
        for candidate in self._candidates(fp):
            if self.fingerprint(candidate) == fp and self.agrees_beyond_window(candidate, ideal):
                logger.debug(f"{ideal.describe()} matches {candidate.describe()} up to radius {self.truncation.radius}")
                return replace(candidate, trace=ideal.trace)
        logger.info(f"No closed form for an ideal with {bin(fp).count('1')} ball words; kept Opaque")
        return ideal

    def resolve(self, ideal: ConstructibleIdeal, fp: Optional[int] = None) -> ConstructibleIdeal:
        """Symbolic form of ``ideal``: a tracked representative with its fingerprint, or an upgrade."""
        if ideal.shape is not IdealShape.OPAQUE:
            return ideal
        fp = self.fingerprint(ideal) if fp is None else fp
        k = self._by_fingerprint.get(fp)
        if k is not None and self.representatives[k].shape is not IdealShape.OPAQUE \
                and self.agrees_beyond_window(self.representatives[k], ideal):
            return replace(self.representatives[k], trace=ideal.trace)
        return self.upgrade(ideal, fp)

    # --- operations -----------------------------------------------------------------

    def translate(self, s: Word, ideal: ConstructibleIdeal) -> ConstructibleIdeal:
        """s·I."""
        p = self.p
        s = normalize(p, s)
        if not s or ideal.shape is IdealShape.EMPTY:
            return ideal
        if ideal.shape is IdealShape.PRINCIPAL:
            return ConstructibleIdeal(IdealShape.PRINCIPAL, normalize(p, s + ideal.word))
        if ideal.shape is IdealShape.FAMILY:
            return replace(ideal, word=normalize(p, s + ideal.word), trace=())
        inverse = invert(p, letter_element(p, s), self.bound)
        return self.resolve(opaque(compose(p, ideal_hull(p, ideal), inverse, self.bound),
                                   ideal.trace + (f"translate({format_word(s)})",)))

    def _preimage_symbolic(self, x: Letter, ideal: ConstructibleIdeal) -> Optional[ConstructibleIdeal]:
        p = self.p
        if ideal.shape is IdealShape.EMPTY or ideal.is_whole:
            return ideal
        if ideal.shape in (IdealShape.PRINCIPAL, IdealShape.FAMILY):
            try:
                u = divides(p, (x,), ideal.word, self.bound)
            except DivisionUnknown:
                return None
            if u is not None:
                return replace(ideal, word=u, trace=())
            if ideal.shape is IdealShape.FAMILY and not ideal.word and x.symbol in ideal.symbols:
                return WHOLE
        return None

    def _preimage_hull(self, x: Letter, ideal: ConstructibleIdeal) -> ConstructibleIdeal:
        hull = compose(self.p, ideal_hull(self.p, ideal), letter_element(self.p, (x,)), self.bound)
        return opaque(hull, ideal.trace + (f"preimage({x}, {ideal.describe()})",))

    def preimage(self, x: Letter, ideal: ConstructibleIdeal) -> ConstructibleIdeal:
        """x^{-1}I = {w : x·w in I}."""
        symbolic = self._preimage_symbolic(x, ideal)
        if symbolic is not None:
            return symbolic
        return self.resolve(self._preimage_hull(x, ideal))

    def _intersect_symbolic(self, first: ConstructibleIdeal, second: ConstructibleIdeal) -> Optional[ConstructibleIdeal]:
        p = self.p
        if first.shape is IdealShape.EMPTY or second.shape is IdealShape.EMPTY:
            return EMPTY_IDEAL
        if first.is_whole or first == second:
            return second
        if second.is_whole:
            return first
        for a, b in ((first, second), (second, first)):
            if a.shape is IdealShape.OPAQUE or b.shape is not IdealShape.PRINCIPAL:
                continue
            try:
                if a.contains(p, b.word, self.bound):
                    return b
                if divides(p, b.word, a.word, self.bound) is not None:
                    return a
            except DivisionUnknown:
                return None
        return None

    def intersect(self, first: ConstructibleIdeal, second: ConstructibleIdeal) -> ConstructibleIdeal:
        symbolic = self._intersect_symbolic(first, second)
        if symbolic is not None:
            return symbolic
        hull = compose(self.p, ideal_hull(self.p, first), ideal_hull(self.p, second), self.bound)
        fp = self.fingerprint(first) & self.fingerprint(second)
        trace = (f"intersect({first.describe()}, {second.describe()})",)
        return self.resolve(opaque(hull, trace), fp)

    # --- closure --------------------------------------------------------------------

    def add(self, ideal: ConstructibleIdeal, fp: Optional[int] = None) -> Tuple[int, bool]:
        """Track ``ideal``; returns its representative index and whether it is new."""
        fp = self.fingerprint(ideal) if fp is None else fp
        self._fingerprint_cache.setdefault(ideal, fp)
        k = self._by_fingerprint.get(fp)
        if k is not None:
            radius = self.truncation.radius
            if _preference(ideal, self.p, radius) < _preference(self.representatives[k], self.p, radius):
                self.representatives[k] = ideal
            return k, False
        ideal = self.upgrade(ideal, fp)
        self._by_fingerprint[fp] = len(self.representatives)
        self.representatives.append(ideal)
        self.fingerprints.append(fp)
        return len(self.representatives) - 1, True

    def _preimage_fingerprint(self, x: Letter, k: int) -> int:
        ideal, source = self.representatives[k], self.fingerprints[k]
        fp = 0
        for i, w in enumerate(self.ball):
            image = normalize(self.p, (x,) + w)
            j = self.index.get(image)
            inside = (source >> j) & 1 if j is not None else ideal.contains(self.p, image, self.bound)
            if inside:
                fp |= 1 << i
        return fp

    def _derived(self, k: int, x: Letter) -> Iterator[Tuple[ConstructibleIdeal, Optional[int]]]:
        ideal = self.representatives[k]
        symbolic = self._preimage_symbolic(x, ideal)
        if symbolic is not None:
            yield symbolic, None
        else:
            yield self._preimage_hull(x, ideal), self._preimage_fingerprint(x, k)
        yield self.translate((x,), ideal), None

    def _meet(self, i: int, j: int) -> Optional[int]:
        """Tabulate representative i ∩ representative j; returns the index if it is new."""
        fp = self.fingerprints[i] & self.fingerprints[j]
        k = self._by_fingerprint.get(fp)
        fresh = None
        if k is None:
            first, second = self.representatives[i], self.representatives[j]
            ideal = self._intersect_symbolic(first, second)
            if ideal is None:
                hull = compose(self.p, ideal_hull(self.p, first), ideal_hull(self.p, second), self.bound)
                ideal = opaque(hull, (f"intersect({first.describe()}, {second.describe()})",))
            k, is_new = self.add(ideal, fp)
            fresh = k if is_new else None
        self.table[(i, j)] = self.table[(j, i)] = k
        return fresh

    @profile
    def close(self, budget: int, max_rounds: int = CLOSURE_MAX_ROUNDS) -> 'IdealSemilattice':
        """
        Close {S} under preimage and translation by every window letter and
        under pairwise intersection, until no new fingerprint appears
        (saturated) or ``budget`` representatives exist (exhausted).
        """
        letters = self.p.letters(self.truncation.window)
        if not self.representatives:
            self.add(WHOLE)
        frontier = list(range(len(self.representatives)))
        while frontier:
            if self.rounds >= max_rounds:
                self.exhausted = True
                break
            self.rounds += 1
            fresh: List[int] = []
            derived = ((k, x) for k in frontier for x in letters)
            for k, x in derived:
                for ideal, fp in self._derived(k, x):
                    index, is_new = self.add(ideal, fp)
                    if is_new:
                        fresh.append(index)
                if len(self.representatives) >= budget:
                    self.exhausted = True
                    break
            n = len(self.representatives)
            pairs = ((i, j) for i in range(n) for j in range(i, n) if (i, j) not in self.table)
            for i, j in pairs:
                if self.exhausted:
                    break
                new = self._meet(i, j)
                if new is not None:
                    fresh.append(new)
                    self.exhausted = len(self.representatives) >= budget
            if self.exhausted:
                break
            frontier = fresh
        self.saturated = not self.exhausted
        logger.info(f"{self.p.name}: {len(self.representatives)} ideals after {self.rounds} rounds "
                    f"({'saturated' if self.saturated else 'budget exhausted'})")
        return self

    # --- queries --------------------------------------------------------------------

    def member_bit(self, k: int, w: Word) -> bool:
        w = normalize(self.p, w)
        i = self.index.get(w)
        if i is not None:
            return bool((self.fingerprints[k] >> i) & 1)
        return self.representatives[k].contains(self.p, w, self.bound)

    def index_of(self, ideal: ConstructibleIdeal) -> Optional[int]:
        return self._by_fingerprint.get(self.fingerprint(ideal))

    def is_subset(self, i: int, j: int) -> bool:
        return self.fingerprints[i] & ~self.fingerprints[j] == 0

    def generators(self, k: int, limit: int = 6) -> List[str]:
        minimal = [format_word(w) for w in self.minimal_elements(self.fingerprints[k])]
        return minimal if len(minimal) <= limit else minimal[:limit] + ["..."]

    def shapes(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for ideal in self.representatives:
            counts[ideal.shape.value] = counts.get(ideal.shape.value, 0) + 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "representatives": [
                {"description": ideal.describe(), "generators": self.generators(k),
                 "fingerprint_hash": self.fingerprint_hash(self.fingerprints[k])}
                for k, ideal in enumerate(self.representatives)
            ],
            "table": sorted([i, j, k] for (i, j), k in self.table.items() if i <= j),
            "saturated": self.saturated,
            "shapes": self.shapes(),
            "tracked_hash": self.tracked_hash(),
            "up_to_radius": self.truncation.radius,
        }


def semilattice_closure(p: Presentation, budget: int, radius: int, window: IndexWindow,
                        bound: int = 12) -> IdealSemilattice:
    return IdealSemilattice(p, Truncation(radius, window), bound).close(budget)


def ideals_containing(words: Sequence[Word], closure: IdealSemilattice) -> List[ConstructibleIdeal]:
    return [ideal for k, ideal in enumerate(closure.representatives)
            if all(closure.member_bit(k, w) for w in words)]


def _generator_count(lattice: IdealSemilattice, fp: int) -> int:
    """Minimal generators of the ideal within the ball: prefix-minimal members not divisible by another one."""
    p = lattice.p
    minimal = lattice.minimal_elements(fp)
    count = 0
    for w in minimal:
        redundant = False
        for v in minimal:
            if v != w and len(v) <= len(w) and divides(p, v, w, lattice.bound) not in (None, ()):
                redundant = True
                break
        count += not redundant
    return count


@profile
def finite_alignment_report(p: Presentation, truncation: Truncation, bound: int = 12,
                            pairs: Optional[Sequence[Tuple[Word, Word]]] = None) -> Dict[str, Any]:
    """
    Generator counts of sS ∩ tS, at the window and at the window widened by one.

    A count that grows with the window is evidence that the intersection is
    not finitely generated.
    """
    lattice = IdealSemilattice(p, truncation, bound)
    widened = IdealSemilattice(p, Truncation(truncation.radius, truncation.window.widened(1),
                                             truncation.probe_margin, truncation.probe_radius), bound)
    if pairs is None:
        letters = [(letter,) for letter in p.letters(truncation.window)]
        pairs = [(s, t) for i, s in enumerate(letters) for t in letters[i + 1:]]

    rows = []
    for s, t in pairs:
        counts = []
        for lat in (lattice, widened):
            fp = lat.fingerprint(principal(p, s)) & lat.fingerprint(principal(p, t))
            counts.append(_generator_count(lat, fp))
        rows.append({"s": format_word(s), "t": format_word(t), "count": counts[0],
                     "count_widened": counts[1], "grows": counts[1] > counts[0]})
    return {
        "pairs": rows,
        "max_count": max((row["count"] for row in rows), default=0),
        "finitely_aligned_evidence": not any(row["grows"] for row in rows),
        "window": str(truncation.window),
        "widened_window": str(widened.truncation.window),
    }
