"""
Semi-characters
---------------
Filters on the tracked ideal semilattice: point characters chi_s, limits of
sequences such as chi_{b x[n]}, cover relations and the two conditions
defining the closure of the point characters.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from constants import LIMIT_TAIL_FRACTION
from monoid_functions import (
    DivisionUnknown,
    LimitDivergence,
    Pattern,
    Status,
    Verdict,
    Word,
    WordSyntaxError,
    format_word,
    instantiate,
    normalize,
)
from utils.ideals import WHOLE, IdealSemilattice

logger = logging.getLogger('spectrum')

Cover = Tuple[int, Tuple[int, ...]]

TAIL_OUTSIDE = "outside"
TAIL_INSIDE = "inside"


@dataclass(frozen=True)
class SemiCharacter:
    """chi(p_X) for every tracked representative X, in closure order."""
    values: Tuple[bool, ...]
    tracked_hash: str
    unknown: Tuple[int, ...] = ()

    def ones(self) -> List[int]:
        return [k for k, value in enumerate(self.values) if value]

    def __getitem__(self, k: int) -> bool:
        return self.values[k]

    def describe(self, closure: IdealSemilattice) -> List[str]:
        return [closure.representatives[k].describe() for k in self.ones()]


def chi_of(s: Word, closure: IdealSemilattice) -> SemiCharacter:
    """The point character chi_s(p_X) = 1_X(s)."""
    values = []
    unknown = []
    for k in range(len(closure.representatives)):
        try:
            values.append(closure.member_bit(k, s))
        except DivisionUnknown:
            values.append(False)
            unknown.append(k)
    return SemiCharacter(tuple(values), closure.tracked_hash(), tuple(unknown))


def sequence_variable(pattern: Pattern) -> Optional[str]:
    variables = {letter.variable for letter in pattern if letter.variable is not None}
    if len(variables) > 1:
        raise WordSyntaxError(f"a sequence takes one index variable, got {sorted(variables)}")
    return next(iter(variables), None)


def sequence_term(pattern: Pattern, n: int) -> Word:
    variable = sequence_variable(pattern)
    return instantiate(pattern, {variable: n} if variable else {})


def tail_indices(closure: IdealSemilattice, tail: str = TAIL_OUTSIDE) -> List[int]:
    """
    ceil(len * fraction) indices per side of the window, taken just outside it
    or, with ``tail="inside"``, at its two ends.
    """
    window = closure.truncation.window
    t = max(1, math.ceil(len(window) * LIMIT_TAIL_FRACTION))
    if tail == TAIL_INSIDE:
        t = min(t, len(window))
        return sorted(set(range(window.low, window.low + t)) | set(range(window.high - t + 1, window.high + 1)))
    if tail != TAIL_OUTSIDE:
        raise ValueError(f"tail must be {TAIL_OUTSIDE!r} or {TAIL_INSIDE!r}, not {tail!r}")
    return list(range(window.low - t, window.low)) + list(range(window.high + 1, window.high + t + 1))


def limit_character(pattern: Pattern, closure: IdealSemilattice, tail: str = TAIL_OUTSIDE) -> SemiCharacter:
    """
    Limit of chi_{seq(n)} as n leaves the window in both directions, sampled on
    ``tail_indices``.

    Membership outside the ball is decided exactly by the symbolic ideals.

    Raises:
        LimitDivergence: some tracked value is not constant over the tail
    """
    p = closure.p
    terms = [normalize(p, sequence_term(pattern, n)) for n in tail_indices(closure, tail)]
    values = []
    diverging = []
    for k, ideal in enumerate(closure.representatives):
        bits = {ideal.contains(p, term, closure.bound) for term in terms}
        if len(bits) > 1:
            diverging.append(k)
        values.append(bits == {True})
    if diverging:
        names = ", ".join(closure.representatives[k].describe() for k in diverging[:5])
        raise LimitDivergence(f"no stable value on {len(diverging)} tracked ideals ({names})", diverging)
    return SemiCharacter(tuple(values), closure.tracked_hash())


def find_covers(closure: IdealSemilattice) -> List[Cover]:
    """
    Cover relations X = X_1 ∪ ... ∪ X_n among tracked ideals.

    A cover must hold on the ball and on the probe shell; ball-level unions
    that miss probe words (e.g. Family(b) against finitely many b x[n] S) are
    window artifacts and are dropped.
    """
    covers: List[Cover] = []
    fps = closure.fingerprints
    probe = closure.probe_words()
    for x, fx in enumerate(fps):
        if fx == 0:
            continue
        subs = [y for y, fy in enumerate(fps) if fy and fy != fx and fy & ~fx == 0]
        union = 0
        for y in subs:
            union |= fps[y]
        if union != fx:
            continue

        chosen: List[int] = []
        covered = 0
        for y in sorted(subs, key=lambda y: (-bin(fps[y]).count('1'), y)):
            if fps[y] & ~covered:
                chosen.append(y)
                covered |= fps[y]
            if covered == fx:
                break
        for y in list(chosen):
            rest = 0
            for z in chosen:
                if z != y:
                    rest |= fps[z]
            if rest == fx:
                chosen.remove(y)

        base = closure.representatives[x]
        outside = [w for w in probe if base.contains(closure.p, w, closure.bound)]
        members = [closure.representatives[y] for y in chosen]
        missed = [w for w in outside if not any(m.contains(closure.p, w, closure.bound) for m in members)]
        if missed:
            logger.debug(f"{base.describe()}: ball cover misses {format_word(missed[0])} beyond the window")
            continue
        covers.append((x, tuple(sorted(chosen))))
    return covers


def is_in_omega(chi: SemiCharacter, covers: Sequence[Cover], closure: IdealSemilattice) -> Verdict:
    """chi(0) = 0, and chi(p_X) = 1 forces chi(p_{X_i}) = 1 for some part of every listed cover of X."""
    certificate: Dict = {"covers_checked": len(covers), "tracked_hash": chi.tracked_hash}
    for k, fp in enumerate(closure.fingerprints):
        if fp == 0 and chi[k]:
            certificate["violated"] = "chi(0) = 1"
            return Verdict(Status.FAILS, certificate, witness=k, note="the zero projection has value 1")
    for x, parts in covers:
        if chi[x] and not any(chi[y] for y in parts):
            certificate["violated"] = {
                "ideal": closure.representatives[x].describe(),
                "cover": [closure.representatives[y].describe() for y in parts],
            }
            return Verdict(Status.FAILS, certificate, witness=(x, parts))
    return Verdict(Status.HOLDS, certificate, note="relative to the listed covers")


def check_filter(chi: SemiCharacter, closure: IdealSemilattice) -> Verdict:
    """chi(S) = 1, multiplicativity on the intersection table, upward closure on fingerprints."""
    whole = closure.index_of(WHOLE)
    if whole is not None and not chi[whole]:
        return Verdict(Status.FAILS, {"violated": "chi(S) = 0"})
    for (i, j), k in closure.table.items():
        if chi[k] != (chi[i] and chi[j]):
            names = [closure.representatives[m].describe() for m in (i, j, k)]
            return Verdict(Status.FAILS, {"violated": "multiplicativity", "ideals": names}, witness=(i, j, k))
    n = len(closure.representatives)
    for i in range(n):
        if not chi[i]:
            continue
        for j in range(n):
            if not chi[j] and closure.is_subset(i, j):
                names = [closure.representatives[m].describe() for m in (i, j)]
                return Verdict(Status.FAILS, {"violated": "upward closure", "ideals": names}, witness=(i, j))
    return Verdict(Status.HOLDS, {"tracked": n, "tracked_hash": chi.tracked_hash})
