"""
Truncated Regular Representation
--------------------------------
Sparse operators on the span of a ball: lambda_s, its adjoint, hull elements
and ideal projections, an expression evaluator for operator polynomials, and
residual checks on interior vectors.

An operator of depth d is trusted only on basis vectors of length at most
radius - d whose indices stay d * (max index shift) inside the window.
"""
import logging
import math
import re
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from constants import RESIDUAL_TOLERANCE
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
from utils.hull import HullElement, FactorKind, apply, parse_hull
from utils.ideals import ConstructibleIdeal, GeneralizedIdeal, parse_generalized

logger = logging.getLogger('regrep')


class BallBasis:
    """Orthonormal basis of delta functions on the ball words."""

    def __init__(self, p: Presentation, truncation: Truncation, bound: int = 12):
        self.p = p
        self.truncation = truncation
        self.bound = bound
        self.words = truncation.ball(p)
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def interior(self, depth: int) -> np.ndarray:
        return np.array([self.index[w] for w in self.truncation.interior(self.p, depth)], dtype=int)


@dataclass
class BallOperator:
    basis: BallBasis
    matrix: sparse.csr_matrix
    depth: int = 0
    boundary: FrozenSet[int] = field(default_factory=frozenset)

    def _coerce(self, other) -> 'BallOperator':
        if isinstance(other, BallOperator):
            return other
        if isinstance(other, (int, float)):
            return identity(self.basis) * other
        return NotImplemented

    def __matmul__(self, other: 'BallOperator') -> 'BallOperator':
        other = self._coerce(other)
        return BallOperator(self.basis, (self.matrix @ other.matrix).tocsr(),
                            self.depth + other.depth, self.boundary | other.boundary)

    def __mul__(self, other) -> 'BallOperator':
        if isinstance(other, (int, float)):
            return BallOperator(self.basis, (self.matrix * other).tocsr(), self.depth, self.boundary)
        return self @ other

    def __rmul__(self, other) -> 'BallOperator':
        return self * other

    def __add__(self, other) -> 'BallOperator':
        other = self._coerce(other)
        return BallOperator(self.basis, (self.matrix + other.matrix).tocsr(),
                            max(self.depth, other.depth), self.boundary | other.boundary)

    __radd__ = __add__

    def __neg__(self) -> 'BallOperator':
        return self * -1

    def __sub__(self, other) -> 'BallOperator':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'BallOperator':
        return self._coerce(other) - self

    def transpose(self) -> 'BallOperator':
        return BallOperator(self.basis, self.matrix.T.tocsr(), self.depth, self.boundary)

    def column(self, w: Word) -> dict:
        """Image of delta_w as {word: coefficient}."""
        col = self.matrix[:, self.basis.index[w]].tocoo()
        return {self.basis.words[i]: v for i, v in zip(col.row, col.data) if v != 0}


def identity(basis: BallBasis) -> BallOperator:
    return BallOperator(basis, sparse.identity(len(basis), format='csr'))


def _partial_permutation(basis: BallBasis, images: Sequence[Optional[Word]], depth: int) -> BallOperator:
    rows, cols, boundary = [], [], set()
    for j, image in enumerate(images):
        if image is None:
            continue
        i = basis.index.get(image)
        if i is None:
            boundary.add(j)
            continue
        rows.append(i)
        cols.append(j)
    n = len(basis)
    matrix = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    if boundary:
        logger.debug(f"{len(boundary)} boundary columns at depth {depth}")
    return BallOperator(basis, matrix, depth, frozenset(boundary))


def lambda_matrix(s: Word, basis: BallBasis) -> BallOperator:
    """lambda_s delta_w = delta_{st}; images leaving the ball mark boundary columns."""
    p = basis.p
    return _partial_permutation(basis, [normalize(p, s + w) for w in basis.words], len(s))


def lstar_matrix(s: Word, basis: BallBasis) -> BallOperator:
    """The adjoint of lambda_s, i.e. the transpose of the partial permutation."""
    return lambda_matrix(s, basis).transpose()


def hull_matrix(h: HullElement, basis: BallBasis) -> BallOperator:
    images = []
    for w in basis.words:
        try:
            images.append(apply(basis.p, h, w, basis.bound))
        except DivisionUnknown:
            logger.debug(f"column {format_word(w)} unusable for {h}")
            images.append(None)
    depth = sum(len(f.word) for f in h.factors if f.kind is not FactorKind.IDEMPOTENT)
    return _partial_permutation(basis, images, depth)


def indicator_matrix(ideal: Union[ConstructibleIdeal, GeneralizedIdeal], basis: BallBasis) -> BallOperator:
    """Diagonal projection onto the ball words of the ideal."""
    diagonal = [1.0 if ideal.contains(basis.p, w, basis.bound) else 0.0 for w in basis.words]
    return BallOperator(basis, sparse.diags(diagonal, format='csr'))


# --- Expressions ---------------------------------------------------------------------

_OPERATOR_HEAD = re.compile(r"(Lstar|L|P|H)\[")
_INTEGER = re.compile(r"\d+")


class _ExpressionParser:
    """
    Recursive-descent parser for ``(L[a]-1)*(L[c]-1)*P[Family(b)]``.

    Atoms are ``L[word]``, ``Lstar[word]``, ``P[ideal]``, ``H[zigzag]`` and
    integers (multiples of the identity).
    """

    def __init__(self, text: str, basis: BallBasis):
        self.text = text
        self.basis = basis
        self.pos = 0

    def error(self, message: str) -> WordSyntaxError:
        return WordSyntaxError(f"{message} at position {self.pos + 1} of '{self.text}'")

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def parse(self) -> BallOperator:
        result = self.expression()
        if self.peek():
            raise self.error(f"unexpected '{self.peek()}'")
        return result

    def expression(self) -> BallOperator:
        result = self.term()
        while self.peek() in ('+', '-'):
            op = self.text[self.pos]
            self.pos += 1
            right = self.term()
            result = result + right if op == '+' else result - right
        return result

    def term(self) -> BallOperator:
        result = self.factor()
        while self.peek() == '*':
            self.pos += 1
            result = result @ self.factor()
        return result

    def factor(self) -> BallOperator:
        char = self.peek()
        if char == '-':
            self.pos += 1
            return -self.factor()
        if char == '(':
            self.pos += 1
            result = self.expression()
            if self.peek() != ')':
                raise self.error("missing ')'")
            self.pos += 1
            return result
        number = _INTEGER.match(self.text, self.pos)
        if number:
            self.pos = number.end()
            return identity(self.basis) * int(number.group())
        head = _OPERATOR_HEAD.match(self.text, self.pos)
        if not head:
            raise self.error("expected L[..], Lstar[..], P[..], H[..], an integer or '('")
        start = head.end()
        depth, end = 1, start
        while end < len(self.text) and depth:
            depth += {'[': 1, ']': -1}.get(self.text[end], 0)
            end += 1
        if depth:
            raise self.error("unbalanced '['")
        self.pos = end
        return self.atom(head.group(1), self.text[start:end - 1])

    def atom(self, kind: str, argument: str) -> BallOperator:
        p = self.basis.p
        if kind == 'L':
            return lambda_matrix(parse_word(p, argument), self.basis)
        if kind == 'Lstar':
            return lstar_matrix(parse_word(p, argument), self.basis)
        if kind == 'H':
            return hull_matrix(parse_hull(p, argument, self.basis.bound), self.basis)
        return indicator_matrix(parse_generalized(p, argument), self.basis)


def parse_expression(text: str, basis: BallBasis) -> Optional[BallOperator]:
    """The operator of ``text``; None for the empty polynomial."""
    if not text.strip():
        return None
    return _ExpressionParser(text, basis).parse()


def interior_residual(op: Optional[BallOperator]) -> float:
    """Largest Euclidean norm of op·delta_w over interior basis vectors at op's depth."""
    if op is None:
        return 0.0
    columns = op.basis.interior(op.depth)
    if not len(columns):
        logger.warning(f"no interior vectors at depth {op.depth}; raise the radius or widen the window")
        return 0.0
    block = op.matrix[:, columns]
    norms = np.sqrt(np.asarray(block.multiply(block).sum(axis=0))).ravel()
    return float(norms.max()) if norms.size else 0.0


def kernel_witness_check(expr: Union[str, BallOperator, None], basis: BallBasis) -> float:
    """Maximum interior residual of an operator polynomial; 0 certifies it vanishes at this truncation."""
    op = parse_expression(expr, basis) if isinstance(expr, str) else expr
    return interior_residual(op)


@dataclass
class CoverRelationReport:
    residual: float
    cover_holds: bool
    uncovered: Tuple[str, ...] = ()


def cover_relation_check(X: ConstructibleIdeal, covers: Sequence[ConstructibleIdeal], basis: BallBasis) -> CoverRelationReport:
    """Evaluate prod_i (P_X - P_{X_i}) on the ball; it vanishes whenever X = ∪ X_i there."""
    p, bound = basis.p, basis.bound
    uncovered = [w for w in basis.words
                 if X.contains(p, w, bound) and not any(c.contains(p, w, bound) for c in covers)]
    if uncovered:
        logger.info(f"{X.describe()} is not the union of the covers on the ball")
    projection = indicator_matrix(X, basis)
    op = identity(basis)
    for cover in covers:
        op = op @ (projection - indicator_matrix(cover, basis))
    if not covers:
        op = projection
    return CoverRelationReport(interior_residual(op), not uncovered, tuple(format_word(w) for w in uncovered[:5]))


def isometry_residual(s: Word, basis: BallBasis) -> float:
    """lambda_s^* lambda_s - 1 on the interior."""
    return interior_residual(lstar_matrix(s, basis) @ lambda_matrix(s, basis) - 1)


def product_residual(s: Word, t: Word, basis: BallBasis) -> float:
    """lambda_s lambda_t - lambda_{st} on the interior."""
    return interior_residual(lambda_matrix(s, basis) @ lambda_matrix(t, basis) - lambda_matrix(s + t, basis))


def is_zero(residual: float) -> bool:
    return residual <= RESIDUAL_TOLERANCE


def averaging_epsilon(m: Optional[float], alpha: float) -> Tuple[float, float, int]:
    """
    An epsilon with alpha (1 - m eps)^2 > 1/m.

    Returns (epsilon, supremum, m_used); epsilon is half the supremum. For
    m = None or infinity the smallest m' with 1/m' < alpha is used.

    Raises:
        ValueError: alpha <= 1/m, or alpha <= 0 in the infinite case
    """
    if m is None or m == math.inf:
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        m_used = math.floor(1 / alpha) + 1
        while 1 / m_used >= alpha:
            m_used += 1
    else:
        m_used = int(m)
        if m_used < 1 or alpha <= 1 / m_used:
            raise ValueError(f"alpha must exceed 1/m = {1 / max(m_used, 1)}, got {alpha}")
    supremum = (1 - 1 / math.sqrt(m_used * alpha)) / m_used
    return supremum / 2, supremum, m_used


def averaged_shift_trace(m: int) -> float:
    """Normalized trace of |(1/m) sum_{k=1..m} u^k|^2 for the m x m cyclic shift u."""
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    u = np.roll(np.eye(m), 1, axis=0)
    average = sum(np.linalg.matrix_power(u, k) for k in range(1, m + 1)) / m
    b = average.T @ average
    return float(np.trace(b) / m)


__all__ = [
    'BallBasis', 'BallOperator', 'CoverRelationReport', 'averaged_shift_trace', 'averaging_epsilon',
    'cover_relation_check', 'hull_matrix', 'identity', 'indicator_matrix', 'interior_residual', 'is_zero',
    'isometry_residual', 'kernel_witness_check', 'lambda_matrix', 'lstar_matrix', 'parse_expression',
    'product_residual',
]
