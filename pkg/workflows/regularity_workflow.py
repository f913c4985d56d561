"""
Regularity Workflow
-------------------
Condition-1 data, witness searches for strong C*-regularity, C*-regularity
and the G_P = G criterion, Hausdorffness-failure witnesses, fixed-point
sweeps over short zigzags, and the conditions that imply strong regularity
without a witness search.

Every search is a bounded semi-decision: "holds" comes with a witness that
was replayed through fresh membership and apply queries, and anything else is
"unknown" with the budget or a structural obstruction.
"""
import logging
from itertools import combinations, product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

try:
    from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from constants import INSTANCE_LIMIT, SWEEP_MAX_LENGTH, WITNESS_MAX_REMOVED
from monoid_functions import (
    DivisionUnknown,
    InvalidInstance,
    Letter,
    LimitDivergence,
    Pattern,
    PatternLetter,
    Presentation,
    Status,
    Verdict,
    Word,
    format_word,
)
from utils.cancellativity import check_left_cancellative, check_right_cancellative
from utils.hull import (
    IDENTITY,
    Factor,
    FactorKind,
    HullElement,
    apply,
    compose,
    equal_on_ball,
    format_hull,
    from_factors,
    idempotent_on_ball,
    letter_element,
)
from utils.ideals import (
    ConstructibleIdeal,
    GeneralizedIdeal,
    IdealSemilattice,
    finite_alignment_report,
    ideal_hull,
)
from utils.profiler import profile
from utils.spectrum import SemiCharacter, limit_character, sequence_term, tail_indices

logger = logging.getLogger('regularity_workflow')

Region = Union[ConstructibleIdeal, GeneralizedIdeal]


def _as_generalized(X: Region) -> GeneralizedIdeal:
    return X if isinstance(X, GeneralizedIdeal) else GeneralizedIdeal(X)


def _fixes(p: Presentation, h: HullElement, w: Word, bound: int) -> bool:
    try:
        return apply(p, h, w, bound) == w
    except DivisionUnknown:
        return False


def _region_words(p: Presentation, X: Region, closure: IdealSemilattice) -> Tuple[List[Word], List[Word]]:
    """Ball trace and probe-shell trace of a region."""
    ball = closure.words_of(closure.fingerprint(X))
    probe = [w for w in closure.probe_words() if X.contains(p, w, closure.bound)]
    return ball, probe


def reduce_to_domain(p: Presentation, X: Region, hs: Sequence[HullElement], bound: int = 12) -> List[HullElement]:
    """
    Replace every h by h·p_X. Fixed points inside X are unchanged, and the
    domain of h·p_X is X ∩ dom h, so X itself need not lie in it.
    """
    base = X.base if isinstance(X, GeneralizedIdeal) else X
    projection = ideal_hull(p, base)
    return [compose(p, h, projection, bound) for h in hs]


def condition1_check(p: Presentation, X: Region, hs: Sequence[HullElement],
                     closure: IdealSemilattice) -> Verdict:
    """
    The region X \\ ∪X_i is nonempty and each of its words is fixed by some h_k.

    Raises:
        InvalidInstance: X is not inside dom h_k on the ball for some k
    """
    X = _as_generalized(X)
    bound = closure.bound
    ball, probe = _region_words(p, X, closure)
    for k, h in enumerate(hs):
        for w in ball:
            if apply(p, h, w, bound) is None:
                logger.debug(f"{format_word(w)} lies in {X.describe()} but not in dom {format_hull(h)}")
                raise InvalidInstance(f"{X.describe()} is not inside dom {format_hull(h)}", witness=(k, w))

    certificate: Dict[str, Any] = {"X": X.describe(), "h": [format_hull(h) for h in hs],
                                   "ball_trace": len(ball), "probe_trace": len(probe)}
    if not ball:
        return Verdict(Status.FAILS, certificate, note="X is empty on the ball")
    for w in ball + probe:
        if not any(_fixes(p, h, w, bound) for h in hs):
            certificate["unfixed"] = format_word(w)
            return Verdict(Status.FAILS, certificate, witness=w)
    return Verdict(Status.HOLDS, certificate)


def _cover_search(p: Presentation, target: GeneralizedIdeal, candidates: Sequence[Region],
                  hs: Sequence[HullElement], closure: IdealSemilattice, budget: int) -> Verdict:
    """
    Greedy search for Y_1..Y_l among ``candidates`` and indices k_j such that
    h_{k_j} fixes every ball and probe word of Y_j and the Y_j cover the target.

    Probe words of the target that no fixed candidate contains are looked for
    first, so the obstruction is reported whatever the budget.
    """
    bound = closure.bound
    target_ball, target_probe = _region_words(p, target, closure)
    target_words = target_ball + target_probe
    certificate: Dict[str, Any] = {"X": target.describe(), "radius": closure.truncation.radius,
                                   "window": str(closure.truncation.window), "budget": budget}
    if not target_words:
        return Verdict(Status.HOLDS, dict(certificate, Y=[], k=[]), note="the region is empty")

    words_of: Dict[int, List[Word]] = {}
    fixer: Dict[int, Optional[int]] = {}

    def region(i: int) -> List[Word]:
        if i not in words_of:
            words_of[i] = sum(_region_words(p, candidates[i], closure), [])
        return words_of[i]

    def fixed_by(i: int) -> Optional[int]:
        if i not in fixer:
            y_words = region(i)
            fixer[i] = next((k for k, h in enumerate(hs) if all(_fixes(p, h, w, bound) for w in y_words)), None)
        return fixer[i]

    for w in sorted(target_probe, key=p.word_key):
        if not any(w in region(i) and fixed_by(i) is not None for i in range(len(candidates))):
            fixes = " ∪ ".join(f"Fix({format_hull(h)})" for h in hs)
            good = [f"{candidates[i].describe()} (h{k + 1})" for i, k in fixer.items() if k is not None]
            certificate["obstruction"] = {"good_ideals": good, "uncovered_example": format_word(w)}
            return Verdict(Status.UNKNOWN, certificate,
                           note=f"tracked ideals inside {fixes} leave words beyond the window uncovered, "
                                f"e.g. {format_word(w)}")

    target_fp = closure.fingerprint(target)
    ranked = sorted(range(len(candidates)),
                    key=lambda i: (-bin(closure.fingerprint(candidates[i]) & target_fp).count('1'), i))

    uncovered = set(target_words)
    chosen: List[Tuple[Region, int]] = []
    good: List[str] = []
    spent = 0
    for i in ranked:
        y_words = region(i)
        if not y_words or not uncovered.intersection(y_words):
            continue
        if i not in fixer:
            if spent >= budget:
                certificate["uncovered"] = sorted(format_word(w) for w in list(uncovered)[:5])
                return Verdict(Status.UNKNOWN, certificate, note="budget exhausted")
            spent += 1
        k = fixed_by(i)
        if k is not None:
            chosen.append((candidates[i], k))
            good.append(f"{candidates[i].describe()} (h{k + 1})")
            uncovered.difference_update(y_words)
        if not uncovered:
            break

    if uncovered:
        example = min(uncovered, key=p.word_key)
        fixes = " ∪ ".join(f"Fix({format_hull(h)})" for h in hs)
        certificate["obstruction"] = {"good_ideals": good, "uncovered_example": format_word(example)}
        return Verdict(Status.UNKNOWN, certificate,
                       note=f"tracked ideals inside {fixes} leave words in the ball uncovered, e.g. {format_word(example)}")

    # drop redundant parts, then replay the witness from scratch
    for entry in list(chosen):
        rest = [Y for Y, k in chosen if (Y, k) != entry]
        if all(any(Y.contains(p, w, bound) for Y in rest) for w in target_words):
            chosen.remove(entry)
    replay_ok = all(apply(p, hs[k], w, bound) == w for Y, k in chosen for w in sum(_region_words(p, Y, closure), []))
    replay_ok = replay_ok and all(any(Y.contains(p, w, bound) for Y, _ in chosen) for w in target_words)
    if not replay_ok:
        logger.error(f"witness for {target.describe()} did not survive replay")
        return Verdict(Status.UNKNOWN, certificate, note="witness replay failed")

    certificate["Y"] = [Y.describe() for Y, _ in chosen]
    certificate["k"] = [k + 1 for _, k in chosen]
    certificate["evaluations"] = spent
    return Verdict(Status.HOLDS, certificate, witness=chosen)


def strong_regularity_witness(p: Presentation, X: ConstructibleIdeal, removed: Sequence[ConstructibleIdeal],
                              hs: Sequence[HullElement], closure: IdealSemilattice, budget: int) -> Verdict:
    """Witness ideals Y_j from the tracked semilattice with h_{k_j} p_{Y_j} = p_{Y_j}."""
    target = GeneralizedIdeal(X, tuple(removed))
    candidates: List[Region] = list(closure.representatives)
    if not removed and X not in candidates:
        candidates.insert(0, X)
    return _cover_search(p, target, candidates, hs, closure, budget)


def cstar_regularity_witness(p: Presentation, X: GeneralizedIdeal, hs: Sequence[HullElement],
                             closure: IdealSemilattice, budget: int) -> Verdict:
    """As the strong search, with differences Y \\ Z of tracked ideals also admitted as witnesses."""
    candidates: List[Region] = [X] + list(closure.representatives)
    n = len(closure.representatives)
    target_fp = closure.fingerprint(X)
    for i in range(n):
        if not closure.fingerprints[i] & target_fp:
            continue
        subs = [j for j in range(n) if j != i and closure.fingerprints[j]
                and closure.is_subset(j, i) and closure.fingerprints[j] != closure.fingerprints[i]]
        for r in range(1, WITNESS_MAX_REMOVED + 1):
            for removed in combinations(subs, r):
                candidates.append(GeneralizedIdeal(closure.representatives[i],
                                                   tuple(closure.representatives[j] for j in removed)))
    return _cover_search(p, X, candidates, hs, closure, budget)


def gp_eq_g_check(p: Presentation, g: HullElement, X: ConstructibleIdeal, removed: Sequence[ConstructibleIdeal],
                  closure: IdealSemilattice, budget: int) -> Verdict:
    """
    Tracked Y_j covering X \\ ∪X_i with g p_{Y_j} = p_{Y_j}.

    Raises:
        InvalidInstance: g does not fix the region pointwise on the ball
    """
    target = GeneralizedIdeal(X, tuple(removed))
    for w in closure.words_of(closure.fingerprint(target)):
        if not _fixes(p, g, w, closure.bound):
            logger.warning(f"{format_hull(g)} does not fix {format_word(w)} in {target.describe()}")
            raise InvalidInstance(f"{format_hull(g)} does not fix {target.describe()} pointwise", witness=w)
    candidates: List[Region] = list(closure.representatives)
    if not removed and X not in candidates:
        candidates.insert(0, X)
    return _cover_search(p, target, candidates, [g], closure, budget)


def _sequence_patterns(p: Presentation) -> List[Pattern]:
    prefixes: List[Tuple[PatternLetter, ...]] = [()] + [(PatternLetter(s),) for s in p.plain_symbols]
    return [prefix + (PatternLetter(sigma, 'n', 0, True),) for prefix in prefixes for sigma in p.indexed_symbols]


def _format_pattern(pattern: Pattern) -> str:
    return " ".join(str(letter) for letter in pattern)


def hull_pool(p: Presentation, bound: int = 12) -> List[HullElement]:
    """Plain letters and the conjugates s^{-1} x s of plain letters."""
    plain = [Letter(symbol) for symbol in p.plain_symbols]
    pool = [letter_element(p, (x,)) for x in plain]
    for s, x in product(plain, repeat=2):
        if s != x:
            pool.append(from_factors(p, [Factor(FactorKind.INVERSE, (s,)), Factor(FactorKind.WORD, (x, s))], bound))
    return pool


@profile
def hausdorff_witness_search(p: Presentation, closure: IdealSemilattice,
                             budget: int) -> List[Tuple[HullElement, Pattern, SemiCharacter]]:
    """
    Triples (g, seq, chi) where g fixes every seq(n), chi = lim chi_{seq(n)},
    and every tracked J with chi(p_J) = 1 has a word that g does not fix.
    """
    bound = closure.bound
    indices = list(closure.truncation.window.indices()) + tail_indices(closure)
    probe = closure.probe_words()
    found = []
    spent = 0
    for g in hull_pool(p, bound):
        for pattern in _sequence_patterns(p):
            if spent >= budget:
                logger.info(f"hausdorff scan stopped after {spent} candidates")
                return found
            spent += 1
            if not all(_fixes(p, g, sequence_term(pattern, n), bound) for n in indices):
                continue
            try:
                chi = limit_character(pattern, closure)
            except LimitDivergence as e:
                logger.debug(f"{_format_pattern(pattern)}: {e}")
                continue
            moved_everywhere = True
            for k in chi.ones():
                J = closure.representatives[k]
                words = closure.words_of(closure.fingerprints[k])
                words += [w for w in probe if J.contains(p, w, bound)]
                if all(_fixes(p, g, w, bound) for w in words):
                    moved_everywhere = False
                    break
            if moved_everywhere:
                found.append((g, pattern, chi))
    return found


def _group_embeddable_evidence(p: Presentation, closure: IdealSemilattice) -> Verdict:
    truncation = closure.truncation
    if not p.rules:
        return Verdict(Status.HOLDS, {"rules": 0}, note="free monoids embed in free groups")
    for side, check in (("left", check_left_cancellative), ("right", check_right_cancellative)):
        verdict = check(p, truncation.radius, truncation.window)
        if verdict.fails:
            return Verdict(Status.FAILS, {"side": side, **verdict.certificate},
                           note=f"not {side} cancellative, so not group embeddable")
    return Verdict(Status.UNKNOWN, {"radius": truncation.radius},
                   note="cancellative on the ball; embeddability in a group is not decided")


def _finitely_aligned_evidence(p: Presentation, closure: IdealSemilattice) -> Verdict:
    report = finite_alignment_report(p, closure.truncation, closure.bound)
    growing = [f"{row['s']},{row['t']}" for row in report["pairs"] if row["grows"]]
    if growing:
        return Verdict(Status.FAILS, {"growing_pairs": growing},
                       note="generator counts of sS ∩ tS grow with the window")
    if not p.rules:
        return Verdict(Status.HOLDS, {"max_count": report["max_count"]},
                       note="in a free monoid sS ∩ tS is empty or principal")
    return Verdict(Status.UNKNOWN, {"max_count": report["max_count"]},
                   note="no growth between the window and its widening")


@profile
def sufficient_conditions_check(p: Presentation, closure: IdealSemilattice, budget: int) -> Verdict:
    """
    Strong regularity follows from any of: G_P Hausdorff, S group embeddable,
    S finitely aligned. Group embeddability also implies Hausdorffness.

    Holds when one condition is established, otherwise unknown: a failed
    condition says nothing about strong regularity itself.
    """
    embeddable = _group_embeddable_evidence(p, closure)
    aligned = _finitely_aligned_evidence(p, closure)
    if embeddable.holds:
        hausdorff = Verdict(Status.HOLDS, {}, note="implied by group embeddability")
    else:
        found = hausdorff_witness_search(p, closure, budget)
        if found:
            g, pattern, _ = found[0]
            hausdorff = Verdict(Status.FAILS, {"g": format_hull(g), "sequence": _format_pattern(pattern),
                                               "witnesses": len(found)},
                                note="a limit germ away from the unit shows G_P is not Hausdorff")
        else:
            hausdorff = Verdict(Status.UNKNOWN, {"budget": budget}, note="no non-Hausdorffness witness in the budget")

    conditions = {"hausdorff": hausdorff, "group_embeddable": embeddable, "finitely_aligned": aligned}
    certificate = {name: verdict.to_dict() for name, verdict in conditions.items()}
    established = [name for name, verdict in conditions.items() if verdict.holds]
    if established:
        return Verdict(Status.HOLDS, certificate, witness=established,
                       note=f"strongly regular by {', '.join(established)}")
    if all(verdict.fails for verdict in conditions.values()):
        note = "none of the sufficient conditions applies; strong regularity needs a witness search"
    else:
        note = "no sufficient condition established on the truncation"
    return Verdict(Status.UNKNOWN, certificate, note=note)


class RegularityWorkflow:
    """
    Runs the regularity checks of one presentation against one tracked closure.
    """

    def __init__(self, p: Presentation, closure: IdealSemilattice, show_progress: bool = False):
        self.p = p
        self.closure = closure
        self.bound = closure.bound
        self.show_progress = show_progress and RICH_AVAILABLE
        self.skipped_instances = 0

    def _progress(self):
        return Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                        BarColumn(), TaskProgressColumn(), transient=True)

    def condition1_instances(self, limit: int = INSTANCE_LIMIT) -> List[Tuple[GeneralizedIdeal, List[HullElement]]]:
        """
        (X, hs) pairs built from tracked ideals and singletons or pairs of the
        hull pool (identity included), reduced to X, that satisfy Condition 1.

        Choices whose domain misses part of X are skipped and counted in
        ``skipped_instances``.
        """
        pool = [IDENTITY] + hull_pool(self.p, self.bound)
        choices = [[h] for h in pool] + [list(pair) for pair in combinations(pool, 2)]
        instances = []
        self.skipped_instances = 0
        for ideal, fp in zip(self.closure.representatives, self.closure.fingerprints):
            if not fp:
                continue
            X = GeneralizedIdeal(ideal)
            for hs in choices:
                reduced = reduce_to_domain(self.p, X, hs, self.bound)
                try:
                    verdict = condition1_check(self.p, X, reduced, self.closure)
                except InvalidInstance:
                    self.skipped_instances += 1
                    continue
                if verdict.holds:
                    instances.append((X, reduced))
                    if len(instances) >= limit:
                        break
            if len(instances) >= limit:
                break
        logger.debug(f"{len(instances)} Condition-1 instances, {self.skipped_instances} choices outside the domain")
        return instances

    def run_strong_checks(self, budget: int, limit: int = INSTANCE_LIMIT) -> List[Dict[str, Any]]:
        instances = self.condition1_instances(limit)
        results = []

        def check(X, hs):
            verdict = strong_regularity_witness(self.p, X.base, X.removed, hs, self.closure, budget)
            results.append({"X": X.describe(), "h": [format_hull(h) for h in hs], **verdict.to_dict()})

        if self.show_progress:
            with self._progress() as progress:
                task = progress.add_task("Searching witnesses", total=len(instances))
                for X, hs in instances:
                    check(X, hs)
                    progress.advance(task)
        else:
            for X, hs in instances:
                check(X, hs)
        return results

    def _signed_letters(self) -> List[Factor]:
        letters = self.p.letters(self.closure.truncation.window)
        return [Factor(kind, (letter,)) for letter in letters for kind in (FactorKind.WORD, FactorKind.INVERSE)]

    @profile
    def fix_sweep(self, target: Word, domain: ConstructibleIdeal,
                  max_length: int = SWEEP_MAX_LENGTH) -> Dict[str, Any]:
        """
        Canonical zigzags of at most ``max_length`` signed letters that fix
        ``target`` and whose ball domain contains ``domain``, classified
        extensionally as e, p_X or other.
        """
        p, closure, bound = self.p, self.closure, self.bound
        truncation = closure.truncation
        domain_words = closure.words_of(closure.fingerprint(domain))
        seen = set()
        survivors: List[HullElement] = []
        for length in range(max_length + 1):
            for factors in product(self._signed_letters(), repeat=length):
                h = from_factors(p, factors, bound)
                if h in seen:
                    continue
                seen.add(h)
                if not _fixes(p, h, target, bound):
                    continue
                if any(apply(p, h, w, bound) is None for w in domain_words):
                    continue
                survivors.append(h)

        classes: Dict[str, List[str]] = {}
        representatives: List[HullElement] = []
        for h in survivors:
            if any(equal_on_ball(p, h, other, truncation, bound) for other in representatives):
                continue
            representatives.append(h)
            if equal_on_ball(p, h, IDENTITY, truncation, bound):
                label = "e"
            elif idempotent_on_ball(p, h, truncation, bound):
                fp = 0
                for i, w in enumerate(closure.ball):
                    if apply(p, h, w, bound) is not None:
                        fp |= 1 << i
                label = self._name_domain(fp, domain)
            else:
                label = "other"
            classes.setdefault(label, []).append(format_hull(h))

        logger.info(f"fix sweep: {len(seen)} canonical zigzags, {len(representatives)} distinct survivors")
        return {
            "target": format_word(target),
            "domain": domain.describe(),
            "max_length": max_length,
            "canonical_zigzags": len(seen),
            "classes": classes,
            "all_e_or_projection": set(classes) <= {"e", f"p[{domain.describe()}]"},
        }

    def _name_domain(self, fp: int, domain: ConstructibleIdeal) -> str:
        if fp == self.closure.fingerprint(domain):
            return f"p[{domain.describe()}]"
        for ideal, tracked in zip(self.closure.representatives, self.closure.fingerprints):
            if tracked == fp:
                return f"p[{ideal.describe()}]"
        return f"p[{self.closure.fingerprint_hash(fp)}]"

