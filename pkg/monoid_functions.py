"""
Monoid Functions
----------------
Helper functions for finitely presented monoids over indexed alphabets:
presentation parsing, leftmost rewriting, bounded word equivalence,
overlap analysis, balls and truncations.
"""
import hashlib
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from constants import (
    BALL_SIZE_LIMIT,
    CONFLUENCE_WINDOW_MARGIN,
    PROBE_MARGIN,
    PROBE_RADIUS,
    REWRITE_STEP_BUDGET,
    TAU_SEARCH_LENGTH_SLACK,
)
from utils.profiler import profile, track_hot_path

logger = logging.getLogger('monoid_functions')


# --- Errors -------------------------------------------------------------------

class HullLabError(Exception):
    """Base class for every error raised by hull-lab."""


class PresentationSyntaxError(HullLabError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PresentationSemanticError(HullLabError):
    pass


class WordSyntaxError(HullLabError):
    pass


class RewriteBudgetExceeded(HullLabError):
    pass


class BallTooLarge(HullLabError):
    pass


class DivisionUnknown(HullLabError):
    """A left division could not be decided within its bound."""


class InvalidInstance(HullLabError):
    """A check was called on data violating its precondition."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class LimitDivergence(HullLabError):
    def __init__(self, message: str, diverging: Sequence[int]):
        super().__init__(message)
        self.diverging = tuple(diverging)


# --- Letters, words, windows ---------------------------------------------------

@dataclass(frozen=True)
class Letter:
    symbol: str
    index: Optional[int] = None

    def __str__(self) -> str:
        return self.symbol if self.index is None else f"{self.symbol}[{self.index}]"

    def shifted(self, k: int) -> 'Letter':
        return self if self.index is None else Letter(self.symbol, self.index + k)


Word = Tuple[Letter, ...]
EMPTY_WORD: Word = ()


def format_word(word: Sequence[Letter]) -> str:
    """Render a word with whitespace-separated letters; the empty word is 'e'."""
    return " ".join(str(letter) for letter in word) if word else "e"


def shift_word(word: Word, k: int) -> Word:
    """Apply the index automorphism n -> n + k to every indexed letter."""
    return tuple(letter.shifted(k) for letter in word)


@dataclass(frozen=True)
class IndexWindow:
    low: int
    high: int

    def __post_init__(self):
        if self.low > self.high:
            raise WordSyntaxError(f"empty index window [{self.low},{self.high}]")

    @classmethod
    def parse(cls, text: str) -> 'IndexWindow':
        """Parse ``a..b``, ``[a,b]`` or a single integer."""
        match = re.fullmatch(r"\s*\[?\s*([+-]?\d+)\s*(?:(?:\.\.|,)\s*([+-]?\d+))?\s*\]?\s*", text)
        if not match:
            raise WordSyntaxError(f"cannot parse index window '{text}', expected a..b")
        low = int(match.group(1))
        high = int(match.group(2)) if match.group(2) is not None else low
        return cls(low, high)

    @classmethod
    def covering(cls, words: Iterable[Sequence[Letter]]) -> 'IndexWindow':
        indices = [letter.index for word in words for letter in word if letter.index is not None]
        if not indices:
            return cls(0, 0)
        return cls(min(indices), max(indices))

    def indices(self) -> range:
        return range(self.low, self.high + 1)

    def widened(self, k: int) -> 'IndexWindow':
        return IndexWindow(self.low - k, self.high + k)

    def narrowed(self, k: int) -> Optional['IndexWindow']:
        if self.high - self.low < 2 * k:
            return None
        return IndexWindow(self.low + k, self.high - k)

    def contains(self, word: Sequence[Letter]) -> bool:
        return all(letter.index is None or self.low <= letter.index <= self.high for letter in word)

    def __len__(self) -> int:
        return self.high - self.low + 1

    def __str__(self) -> str:
        return f"[{self.low},{self.high}]"


# --- Rule schemas ---------------------------------------------------------------

@dataclass(frozen=True)
class PatternLetter:
    """A letter of a rule side; indexed letters carry a variable plus offset or a literal index."""
    symbol: str
    variable: Optional[str] = None
    offset: int = 0
    indexed: bool = False

    def __str__(self) -> str:
        if not self.indexed:
            return self.symbol
        if self.variable is None:
            return f"{self.symbol}[{self.offset}]"
        if self.offset == 0:
            return f"{self.symbol}[{self.variable}]"
        sign = '+' if self.offset > 0 else '-'
        return f"{self.symbol}[{self.variable}{sign}{abs(self.offset)}]"


Pattern = Tuple[PatternLetter, ...]


def match_pattern(pattern: Pattern, word: Word, start: int,
                  bindings: Optional[Dict[str, int]] = None) -> Optional[Dict[str, int]]:
    """Match ``pattern`` against ``word`` at ``start``; return the variable bindings or None."""
    if start < 0 or start + len(pattern) > len(word):
        return None
    env = dict(bindings) if bindings else {}
    for position, pat in enumerate(pattern):
        letter = word[start + position]
        if pat.symbol != letter.symbol:
            return None
        if not pat.indexed:
            continue
        if pat.variable is None:
            if letter.index != pat.offset:
                return None
            continue
        value = letter.index - pat.offset
        bound = env.get(pat.variable)
        if bound is None:
            env[pat.variable] = value
        elif bound != value:
            return None
    return env


def instantiate(pattern: Pattern, env: Dict[str, int]) -> Word:
    letters = []
    for pat in pattern:
        if not pat.indexed:
            letters.append(Letter(pat.symbol))
        elif pat.variable is None:
            letters.append(Letter(pat.symbol, pat.offset))
        else:
            letters.append(Letter(pat.symbol, env[pat.variable] + pat.offset))
    return tuple(letters)


@dataclass(frozen=True)
class RuleSchema:
    lhs: Pattern
    rhs: Pattern
    number: int
    line: int = 0

    @property
    def length_reducing(self) -> bool:
        return len(self.lhs) > len(self.rhs)

    @property
    def variables(self) -> Tuple[str, ...]:
        seen = []
        for pat in self.lhs:
            if pat.variable is not None and pat.variable not in seen:
                seen.append(pat.variable)
        return tuple(seen)

    @property
    def index_shift(self) -> int:
        """Largest index change a single application can cause."""
        shift = 0
        for left in self.lhs:
            for right in self.rhs:
                if left.variable is not None and left.variable == right.variable:
                    shift = max(shift, abs(right.offset - left.offset))
        return shift

    def decreasing(self, order: Dict[str, int]) -> bool:
        """True when every instance strictly decreases in length-then-lexicographic order."""
        if self.length_reducing:
            return True
        if len(self.lhs) != len(self.rhs):
            return False
        for left, right in zip(self.lhs, self.rhs):
            if left == right:
                continue
            if left.symbol != right.symbol:
                return order[left.symbol] > order[right.symbol]
            # differing indices give no well-founded order on the integers
            return False
        return False

    def instances(self, window: IndexWindow) -> Iterator[Tuple[Word, Word]]:
        variables = self.variables
        for values in product(window.indices(), repeat=len(variables)):
            env = dict(zip(variables, values))
            yield instantiate(self.lhs, env), instantiate(self.rhs, env)

    def __str__(self) -> str:
        lhs = " ".join(map(str, self.lhs))
        rhs = " ".join(map(str, self.rhs)) or "e"
        return f"{lhs} -> {rhs}"


# --- Presentations ------------------------------------------------------------------

class Presentation:
    """
    A finitely presented monoid over plain and integer-indexed letters.

    Rules are directed rewrites lhs -> rhs; their symmetric closure defines
    word equivalence. Memo tables live in ``cache`` and never change results.
    """

    def __init__(self, alphabet: Dict[str, bool], rules: Sequence[RuleSchema],
                 name: str = "", source: str = ""):
        self.alphabet: Dict[str, bool] = dict(alphabet)
        self.rules: Tuple[RuleSchema, ...] = tuple(rules)
        self.name = name or "presentation"
        self.source_hash = hashlib.sha256(source.encode('utf-8')).hexdigest()
        self._order = {symbol: i for i, symbol in enumerate(self.alphabet)}
        self.rules_by_head: Dict[str, List[RuleSchema]] = defaultdict(list)
        for rule in self.rules:
            self.rules_by_head[rule.lhs[0].symbol].append(rule)
        self.max_lhs = max((len(rule.lhs) for rule in self.rules), default=0)
        self.cache: Dict[str, Dict[Any, Any]] = defaultdict(dict)
        self._interned: Dict[Word, Word] = {}

    def __repr__(self) -> str:
        return f"Presentation({self.name!r}, {len(self.alphabet)} symbols, {len(self.rules)} rules)"

    @property
    def plain_symbols(self) -> List[str]:
        return [s for s, indexed in self.alphabet.items() if not indexed]

    @property
    def indexed_symbols(self) -> List[str]:
        return [s for s, indexed in self.alphabet.items() if indexed]

    @cached_property
    def length_reducing(self) -> bool:
        return all(rule.length_reducing for rule in self.rules)

    @cached_property
    def min_reduction(self) -> int:
        return min((len(rule.lhs) - len(rule.rhs) for rule in self.rules), default=1)

    @cached_property
    def max_growth(self) -> int:
        return max((abs(len(rule.lhs) - len(rule.rhs)) for rule in self.rules), default=0)

    @cached_property
    def terminating(self) -> bool:
        return all(rule.decreasing(self._order) for rule in self.rules)

    @cached_property
    def max_index_shift(self) -> int:
        return max((rule.index_shift for rule in self.rules), default=0)

    @cached_property
    def rhs_inert(self) -> bool:
        """
        True when no left side can start inside a right side, compared by symbol.

        Then a rewrite of x·v with v normal yields a normal word in one step.
        """
        for produced in self.rules:
            for consumed in self.rules:
                for start in range(len(produced.rhs)):
                    overlap = produced.rhs[start:start + len(consumed.lhs)]
                    if all(r.symbol == l.symbol for r, l in zip(overlap, consumed.lhs)):
                        return False
        return True

    def symbol_rank(self, symbol: str) -> int:
        return self._order[symbol]

    def letter_key(self, letter: Letter) -> Tuple[int, int, int]:
        # indices ordered from the centre outwards: 0, -1, 1, -2, 2, ...
        if letter.index is None:
            return (self._order[letter.symbol], 0, 0)
        return (self._order[letter.symbol], abs(letter.index), letter.index)

    def word_key(self, word: Word) -> Tuple[int, Tuple]:
        """Shortlex key used for every deterministic ordering of words."""
        return (len(word), tuple(self.letter_key(letter) for letter in word))

    def letters(self, window: IndexWindow) -> List[Letter]:
        result = []
        for symbol, indexed in self.alphabet.items():
            if indexed:
                result.extend(Letter(symbol, n) for n in window.indices())
            else:
                result.append(Letter(symbol))
        return sorted(result, key=self.letter_key)

    def intern(self, word: Word) -> Word:
        return self._interned.setdefault(word, word)

    def check_word(self, word: Word) -> Word:
        for letter in word:
            indexed = self.alphabet.get(letter.symbol)
            if indexed is None:
                raise WordSyntaxError(f"undeclared symbol '{letter.symbol}'")
            if indexed != (letter.index is not None):
                raise WordSyntaxError(f"letter '{letter}' does not match the declaration of '{letter.symbol}'")
        return word


# --- Parsing ------------------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_DECLARATION = re.compile(rf"\s*({_IDENT})\s*(\[\s*{_IDENT}\s*\])?\s*$")
_TOKEN = re.compile(rf"({_IDENT})(?:\[([^\]]*)\])?")
_INDEX = re.compile(r"\s*(?:(?P<var>[A-Za-z_]\w*)\s*(?:(?P<sign>[+-])\s*(?P<off>\d+))?|(?P<lit>[+-]?\d+))\s*$")


def _split_identifier(ident: str, alphabet: Dict[str, bool]) -> Optional[List[str]]:
    """Split a run of letters such as 'aab' into declared symbols, longest match first."""
    if ident in alphabet:
        return [ident]
    symbols = sorted(alphabet, key=len, reverse=True)
    pieces = []
    rest = ident
    while rest:
        for symbol in symbols:
            if rest.startswith(symbol):
                pieces.append(symbol)
                rest = rest[len(symbol):]
                break
        else:
            return None
    return pieces


def _parse_pattern_side(text: str, alphabet: Dict[str, bool], line: int, column: int,
                        allow_variables: bool = True) -> Pattern:
    letters: List[PatternLetter] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if not match:
            raise PresentationSyntaxError(f"unexpected character '{text[pos]}'", line, column + pos)
        ident, index_text = match.group(1), match.group(2)
        token_column = column + pos
        pos = match.end()
        if ident == 'e' and 'e' not in alphabet and index_text is None:
            continue
        pieces = _split_identifier(ident, alphabet)
        if pieces is None:
            raise PresentationSemanticError(f"line {line}, column {token_column}: undeclared symbol '{ident}'")
        for i, symbol in enumerate(pieces):
            last = i == len(pieces) - 1
            if not alphabet[symbol]:
                if last and index_text is not None:
                    raise PresentationSemanticError(
                        f"line {line}, column {token_column}: plain symbol '{symbol}' takes no index")
                letters.append(PatternLetter(symbol))
                continue
            if not last or index_text is None:
                raise PresentationSemanticError(
                    f"line {line}, column {token_column}: indexed symbol '{symbol}' needs an index")
            index = _INDEX.match(index_text)
            if not index:
                raise PresentationSyntaxError(f"bad index expression '[{index_text}]'", line, token_column)
            if index.group('lit') is not None:
                letters.append(PatternLetter(symbol, None, int(index.group('lit')), True))
                continue
            if not allow_variables:
                raise WordSyntaxError(f"index variable in '{ident}[{index_text}]' where a number is expected")
            offset = int(index.group('off') or 0)
            if index.group('sign') == '-':
                offset = -offset
            letters.append(PatternLetter(symbol, index.group('var'), offset, True))
    return tuple(letters)


def parse_presentation(text: str, name: str = "") -> Presentation:
    """
    Parse a presentation file.

    Format::

        name: S                      (optional)
        letters: a, b, x[n], y[n]
        rules:
          a b x[n] -> b x[n]
          a b y[n] -> b y[n+1]

    Raises:
        PresentationSyntaxError: malformed line, with line and column
        PresentationSemanticError: duplicate or undeclared symbol, unbound rhs variable, empty lhs
    """
    alphabet: Dict[str, bool] = {}
    rules: List[RuleSchema] = []
    in_rules = False
    saw_letters = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        head, colon, rest = line.strip().partition(':')
        keyword = head.strip().lower() if colon and '->' not in head else ''
        rest_column = indent + len(head) + 2

        if keyword == 'name':
            name = rest.strip() or name
            continue
        if keyword == 'letters':
            saw_letters = True
            offset = 0
            for item in rest.split(','):
                declaration = _DECLARATION.match(item)
                if not declaration:
                    raise PresentationSyntaxError(f"bad letter declaration '{item.strip()}'",
                                                  lineno, rest_column + offset)
                symbol = declaration.group(1)
                if symbol in alphabet:
                    raise PresentationSemanticError(f"line {lineno}: duplicate symbol '{symbol}'")
                alphabet[symbol] = declaration.group(2) is not None
                offset += len(item) + 1
            continue
        if keyword == 'rules':
            if not saw_letters:
                raise PresentationSyntaxError("'rules:' before 'letters:'", lineno, indent + 1)
            in_rules = True
            if rest.strip():
                rules.append(_parse_rule(rest, alphabet, lineno, rest_column, len(rules) + 1))
            continue
        if keyword:
            raise PresentationSyntaxError(f"unknown section '{head.strip()}'", lineno, indent + 1)
        if not in_rules:
            raise PresentationSyntaxError("expected 'letters:' or 'rules:'", lineno, indent + 1)
        rules.append(_parse_rule(line, alphabet, lineno, 1, len(rules) + 1))

    if not saw_letters:
        raise PresentationSyntaxError("missing 'letters:' declaration", 1, 1)
    presentation = Presentation(alphabet, rules, name=name, source=text)
    logger.debug(f"Parsed {presentation!r}")
    return presentation


def _parse_rule(text: str, alphabet: Dict[str, bool], line: int, column: int, number: int) -> RuleSchema:
    if text.count('->') != 1:
        raise PresentationSyntaxError("a rule needs exactly one '->'", line, column)
    arrow = text.index('->')
    lhs = _parse_pattern_side(text[:arrow], alphabet, line, column)
    rhs = _parse_pattern_side(text[arrow + 2:], alphabet, line, column + arrow + 2)
    if not lhs:
        raise PresentationSemanticError(f"line {line}: empty left-hand side")
    lhs_variables = {pat.variable for pat in lhs if pat.variable is not None}
    for pat in rhs:
        if pat.variable is not None and pat.variable not in lhs_variables:
            raise PresentationSemanticError(f"line {line}: unbound index variable '{pat.variable}' in '{pat}'")
    return RuleSchema(lhs, rhs, number, line)


def load_presentation(path) -> Presentation:
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    return parse_presentation(text, name=path.stem)


def parse_word(p: Presentation, text: str) -> Word:
    """Parse a CLI word such as ``a a b y[0]``, ``aab y[0]`` or ``e``."""
    try:
        pattern = _parse_pattern_side(text, p.alphabet, 1, 1, allow_variables=False)
    except (PresentationSyntaxError, PresentationSemanticError) as e:
        raise WordSyntaxError(f"cannot parse word '{text}': {e}") from e
    return p.intern(instantiate(pattern, {}))


def parse_pattern_word(p: Presentation, text: str) -> Pattern:
    """Parse a word with index variables, e.g. the sequence ``b x[n]``."""
    try:
        return _parse_pattern_side(text, p.alphabet, 1, 1)
    except (PresentationSyntaxError, PresentationSemanticError) as e:
        raise WordSyntaxError(f"cannot parse pattern '{text}': {e}") from e


# --- Verdicts -------------------------------------------------------------------------

class Status(str, Enum):
    HOLDS = 'holds'
    FAILS = 'fails'
    UNKNOWN = 'unknown'


@dataclass
class Verdict:
    """Outcome of a bounded check; ``certificate`` is JSON-ready, ``witness`` keeps Python objects."""
    status: Status
    certificate: Dict[str, Any] = field(default_factory=dict)
    witness: Any = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    def to_dict(self) -> Dict[str, Any]:
        result = {"status": self.status.value, "certificate": self.certificate}
        if self.note:
            result["note"] = self.note
        return result


# --- Rewriting --------------------------------------------------------------------------

def _find_redex(p: Presentation, word: Word, start: int = 0):
    for i in range(start, len(word)):
        for rule in p.rules_by_head.get(word[i].symbol, ()):
            env = match_pattern(rule.lhs, word, i)
            if env is not None:
                return i, rule, env
    return None


def rewrite_trace(p: Presentation, word: Word, budget: int = REWRITE_STEP_BUDGET) -> List[Word]:
    """Rewrite ``word`` with the leftmost, lowest-numbered redex until none is left."""
    trace = [word]
    start = 0
    for _ in range(budget + 1):
        redex = _find_redex(p, word, start)
        if redex is None:
            return trace
        i, rule, env = redex
        word = word[:i] + instantiate(rule.rhs, env) + word[i + len(rule.lhs):]
        trace.append(word)
        start = max(0, i - p.max_lhs + 1)
    raise RewriteBudgetExceeded(f"no normal form for '{format_word(trace[0])}' within {budget} steps")


def normalize(p: Presentation, word: Word) -> Word:
    """Return the normal form of ``word`` (memoized per presentation)."""
    table = p.cache['normal_form']
    cached = table.get(word)
    if cached is not None:
        return cached
    track_hot_path('normalize.miss')
    result = p.intern(rewrite_trace(p, word)[-1])
    table[word] = result
    return result


def has_redex(p: Presentation, word: Word) -> bool:
    return _find_redex(p, word) is not None


def _has_suffix_redex(p: Presentation, word: Word) -> bool:
    n = len(word)
    for rule in p.rules:
        k = len(rule.lhs)
        if k <= n and match_pattern(rule.lhs, word, n - k) is not None:
            return True
    return False


def forward_steps(p: Presentation, word: Word) -> Iterator[Word]:
    """Every single rewrite lhs -> rhs at every position."""
    for i in range(len(word)):
        for rule in p.rules_by_head.get(word[i].symbol, ()):
            env = match_pattern(rule.lhs, word, i)
            if env is not None:
                yield word[:i] + instantiate(rule.rhs, env) + word[i + len(rule.lhs):]


def reverse_steps(p: Presentation, word: Word, window: IndexWindow) -> Iterator[Word]:
    """Every single rewrite rhs -> lhs; lhs variables missing from rhs range over ``window``."""
    for rule in p.rules:
        width = len(rule.rhs)
        for i in range(len(word) - width + 1):
            env = match_pattern(rule.rhs, word, i)
            if env is None:
                continue
            free = [v for v in rule.variables if v not in env]
            for values in product(window.indices(), repeat=len(free)):
                full = dict(env)
                full.update(zip(free, values))
                yield word[:i] + instantiate(rule.lhs, full) + word[i + width:]


def tau_sequence_search(p: Presentation, w1: Word, w2: Word, bound: int,
                        window: Optional[IndexWindow] = None) -> Optional[List[Word]]:
    """
    Bidirectional breadth-first search for a tau-sequence of at most ``bound`` steps.

    Intermediate words are capped at the longest length such a sequence can reach.
    """
    if w1 == w2:
        return [w1]
    window = window or IndexWindow.covering([w1, w2]).widened(bound)
    max_len = max(len(w1), len(w2)) + (bound // 2 + 1) * p.max_growth + TAU_SEARCH_LENGTH_SLACK

    def neighbours(word: Word) -> Iterator[Word]:
        yield from forward_steps(p, word)
        yield from reverse_steps(p, word, window)

    parents = ({w1: None}, {w2: None})
    frontiers = ([w1], [w2])
    depths = [0, 0]
    while frontiers[0] and frontiers[1] and depths[0] + depths[1] < bound:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = parents[side], parents[1 - side]
        next_frontier = []
        for word in frontiers[side]:
            for candidate in neighbours(word):
                if len(candidate) > max_len or candidate in mine:
                    continue
                mine[candidate] = word
                if candidate in other:
                    return _join_paths(parents[0], parents[1], candidate)
                next_frontier.append(candidate)
        if side == 0:
            frontiers = (next_frontier, frontiers[1])
        else:
            frontiers = (frontiers[0], next_frontier)
        depths[side] += 1
    return None


def _join_paths(forward: Dict, backward: Dict, meet: Word) -> List[Word]:
    path = []
    node = meet
    while node is not None:
        path.append(node)
        node = forward[node]
    path.reverse()
    node = backward[meet]
    while node is not None:
        path.append(node)
        node = backward[node]
    return path


def critical_pairs(p: Presentation, window: IndexWindow) -> List[Tuple[Word, Word]]:
    """All one-step peaks u <- w -> v coming from overlapping redexes with indices in ``window``."""
    concrete = [(rule, lhs, rhs) for rule in p.rules for lhs, rhs in rule.instances(window)]
    pairs: List[Tuple[Word, Word]] = []
    for (rule1, lhs1, rhs1), (rule2, lhs2, rhs2) in product(concrete, repeat=2):
        # a proper suffix of lhs1 is a proper prefix of lhs2
        for k in range(1, min(len(lhs1), len(lhs2))):
            if lhs1[-k:] == lhs2[:k]:
                pairs.append((rhs1 + lhs2[k:], lhs1[:-k] + rhs2))
        # lhs2 sits inside lhs1
        if len(lhs2) <= len(lhs1):
            for i in range(len(lhs1) - len(lhs2) + 1):
                if rule1 is rule2 and lhs1 == lhs2 and i == 0:
                    continue
                if lhs1[i:i + len(lhs2)] == lhs2:
                    pairs.append((rhs1, lhs1[:i] + rhs2 + lhs1[i + len(lhs2):]))
    return pairs


def is_locally_confluent(p: Presentation, window: IndexWindow) -> bool:
    """Every critical pair in ``window`` joins under normalize (memoized)."""
    table = p.cache['confluence']
    if window not in table:
        table[window] = all(normalize(p, u) == normalize(p, v) for u, v in critical_pairs(p, window))
        if not table[window]:
            logger.info(f"{p.name}: critical pairs fail to join on window {window}")
    return table[window]


def equivalent(p: Presentation, w1: Word, w2: Word, bound: int) -> Verdict:
    """
    Bounded word equivalence.

    holds carries a tau-sequence; fails needs distinct normal forms plus a
    termination and local-confluence certificate; anything else is unknown.
    """
    try:
        trace1 = rewrite_trace(p, w1)
        trace2 = rewrite_trace(p, w2)
    except RewriteBudgetExceeded as e:
        logger.debug(str(e))
        trace1 = trace2 = None

    if trace1 is not None and trace1[-1] == trace2[-1]:
        sequence = trace1 + trace2[-2::-1]
        if len(sequence) - 1 <= bound:
            return Verdict(Status.HOLDS, {"tau_sequence": [format_word(w) for w in sequence]}, witness=sequence)
    elif trace1 is not None:
        window = IndexWindow.covering(trace1 + trace2).widened(CONFLUENCE_WINDOW_MARGIN)
        if p.terminating and is_locally_confluent(p, window):
            return Verdict(
                Status.FAILS,
                {"normal_forms": [format_word(trace1[-1]), format_word(trace2[-1])], "confluence_window": str(window)},
                witness=(trace1[-1], trace2[-1]),
            )

    sequence = tau_sequence_search(p, w1, w2, bound)
    if sequence is not None:
        return Verdict(Status.HOLDS, {"tau_sequence": [format_word(w) for w in sequence]}, witness=sequence)
    return Verdict(Status.UNKNOWN, {"bound": bound}, note="no tau-sequence within bound")


# --- Balls and truncations -----------------------------------------------------------------

@profile
def ball_words(p: Presentation, radius: int, window: IndexWindow) -> Tuple[Word, ...]:
    """Normal forms of length <= radius over ``window``, in shortlex order (memoized)."""
    key = (radius, window)
    table = p.cache['ball']
    if key in table:
        return table[key]
    letters = p.letters(window)
    layer: List[Word] = [EMPTY_WORD]
    words: List[Word] = [EMPTY_WORD]
    for _ in range(radius):
        next_layer = []
        for word in layer:
            for letter in letters:
                candidate = word + (letter,)
                # prefixes of normal forms are normal, so only redexes ending here matter
                if not _has_suffix_redex(p, candidate):
                    next_layer.append(p.intern(candidate))
        if len(words) + len(next_layer) > BALL_SIZE_LIMIT:
            raise BallTooLarge(f"ball of radius {radius} on window {window} exceeds {BALL_SIZE_LIMIT} words")
        words.extend(next_layer)
        layer = next_layer
    words.sort(key=p.word_key)
    table[key] = tuple(words)
    logger.debug(f"{p.name}: ball radius {radius} window {window} has {len(words)} words")
    return table[key]


def enumerate_ball(p: Presentation, radius: int, window: IndexWindow) -> FrozenSet[Word]:
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return frozenset(ball_words(p, radius, window))


@dataclass(frozen=True)
class Truncation:
    """
    The finite picture every bounded check works in.

    ``ball`` holds the normal forms of length <= radius inside ``window``;
    the probe shell holds short normal forms that leave the window by at most
    ``probe_margin`` and is used to tell genuine facts from window artifacts.
    """
    radius: int
    window: IndexWindow
    probe_margin: int = PROBE_MARGIN
    probe_radius: int = PROBE_RADIUS

    def ball(self, p: Presentation) -> Tuple[Word, ...]:
        return ball_words(p, self.radius, self.window)

    def probe(self, p: Presentation) -> Tuple[Word, ...]:
        table = p.cache['probe']
        if self not in table:
            if self.probe_margin <= 0:
                table[self] = ()
            else:
                wide = ball_words(p, min(self.radius, self.probe_radius), self.window.widened(self.probe_margin))
                table[self] = tuple(w for w in wide if not self.window.contains(w))
        return table[self]

    def interior(self, p: Presentation, depth: int) -> List[Word]:
        """Ball words far enough from the length and index boundary for an operator of ``depth``."""
        inner = self.window.narrowed(depth * p.max_index_shift)
        if inner is None:
            inner_words = [w for w in self.ball(p) if len(w) <= self.radius - depth
                           and all(letter.index is None for letter in w)]
            return inner_words
        return [w for w in self.ball(p) if len(w) <= self.radius - depth and inner.contains(w)]

    def describe(self) -> Dict[str, Any]:
        return {"radius": self.radius, "window": str(self.window), "probe_margin": self.probe_margin}
