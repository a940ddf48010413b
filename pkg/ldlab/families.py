"""
Code families: Hadamard, Reed-Solomon, tensor products and interleavings.

Conventions used everywhere else in the package:
- Hadamard coordinates run over x in GF(q)^k in base-q order with x_1 the most
  significant digit, and include x = 0.
- A tensor codeword of C2 (x) C1 is an n2 x n1 matrix flattened row-major;
  rows live in C1, columns in C2.
- An interleaved codeword is an n x m grid whose columns are base codewords.
"""

import itertools
import logging
from typing import Sequence, Set, Tuple

import numpy as np

from . import config
from .datatypes import ERASED_CELL, MatrixWord, Word
from .errors import (
    DegreeTooLarge, DuplicateEvalPoints, EnumerationTooLarge, FieldMismatch, LengthMismatch,
)
from .field import field_new
from .linear_code import LinearCode, encode, min_distance

logger = logging.getLogger(__name__)


def hadamard(q: int, k: int) -> LinearCode:
    """Had(q, k): a in GF(q)^k encoded as (a.x) over all x, length q^k"""
    if k < 1:
        raise ValueError(f"Hadamard dimension must be at least 1, got k={k}")
    field = field_new(q)
    n = q ** k
    limit = config.cap('enumeration')
    if n > limit:
        raise EnumerationTooLarge(f"Hadamard({q},{k}) has length {n}, above the enumeration cap {limit}")

    points = field.vectors(k)   # row j is the j-th point x
    code = LinearCode(field, points.T, tag=f"hadamard(q={q},k={k})")
    logger.debug(f"Built {code}")
    return code


def reed_solomon(q: int, eval_set: Sequence[int], degree_bound: int) -> LinearCode:
    """
    Evaluations of polynomials of degree <= degree_bound on eval_set.

    Dimension is degree_bound + 1 and distance n - degree_bound.
    """
    field = field_new(q)
    points = [int(a) for a in eval_set]
    if len(set(points)) != len(points):
        raise DuplicateEvalPoints(f"Evaluation set {points} repeats a point")
    n = len(points)
    if n < 1:
        raise ValueError("Reed-Solomon needs at least one evaluation point")
    if not 0 <= degree_bound < n:
        raise DegreeTooLarge(f"degree_bound {degree_bound} must satisfy 0 <= degree_bound < n = {n}")

    alphas = np.array(points, dtype=np.int64)
    rows = [np.ones(n, dtype=np.int64)]
    for _ in range(degree_bound):
        rows.append(field.mul_arrays(rows[-1], alphas))
    tag = f"reed_solomon(q={q},n={n},degree_bound={degree_bound},k={degree_bound + 1})"
    return LinearCode(field, np.vstack(rows), tag=tag)


def tensor(c2: LinearCode, c1: LinearCode) -> LinearCode:
    """C2 (x) C1 with generator G2 (x) G1 (Kronecker), row-major n2 x n1 flattening"""
    if c1.q != c2.q:
        raise FieldMismatch(f"Cannot tensor codes over GF({c2.q}) and GF({c1.q})")
    field = c1.field
    G2, G1 = c2.generator, c1.generator
    kron = field.mul_arrays(G2[:, np.newaxis, :, np.newaxis], G1[np.newaxis, :, np.newaxis, :])
    G = kron.reshape(c2.k * c1.k, c2.n * c1.n)
    code = LinearCode(field, G, tag=f"tensor({c2.tag} x {c1.tag})")
    code.factors = (c2, c1)
    return code


class InterleavedCode:
    """C^{(m)}: n x m grids whose columns are codewords of the base code"""

    def __init__(self, base: LinearCode, m: int):
        if m < 1:
            raise ValueError(f"Interleaving multiplicity must be at least 1, got m={m}")
        self.base = base
        self.m = m
        self.tag = f"interleave({base.tag}, m={m})"

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def size(self) -> int:
        return self.base.size ** self.m

    @property
    def distance(self) -> int:
        """Row-symbol distance; equal to the base distance"""
        return min_distance(self.base)

    def encode(self, messages: Sequence[Sequence[int]]) -> MatrixWord:
        if len(messages) != self.m:
            raise LengthMismatch(f"{self.tag} takes {self.m} messages, got {len(messages)}")
        return MatrixWord.from_columns([encode(self.base, msg) for msg in messages])

    def grid(self, indices: Sequence[int]) -> MatrixWord:
        """Codeword grid whose column j is base codeword number indices[j]"""
        book = self.base.codebook()
        return MatrixWord.from_array(self.q, np.stack([book[i] for i in indices], axis=1))

    def __repr__(self) -> str:
        return f"InterleavedCode({self.tag})"


def interleave(c: LinearCode, m: int) -> InterleavedCode:
    return InterleavedCode(c, m)


def tuple_row_errors(ic: InterleavedCode, received: MatrixWord) -> np.ndarray:
    """
    Row-metric error count for every tuple of base codewords.

    Entry t of the result (t read in base |C| with column 1 most significant)
    is the number of unerased rows where that grid differs from `received`.
    """
    if received.shape != (ic.n, ic.m):
        raise LengthMismatch(f"Received grid has shape {received.shape}, {ic.tag} expects {(ic.n, ic.m)}")
    limit = config.cap('enumeration')
    if ic.size > limit:
        raise EnumerationTooLarge(f"{ic.tag}: {ic.size} codeword grids exceed the enumeration cap {limit}")

    book = ic.base.codebook()
    R = received.to_array()
    erased_rows = np.any(R == ERASED_CELL, axis=1)
    differs = np.zeros((1, ic.n), dtype=bool)
    for j in range(ic.m):
        column_mismatch = (book != R[:, j]) & ~erased_rows
        differs = (differs[:, np.newaxis, :] | column_mismatch[np.newaxis, :, :]).reshape(-1, ic.n)
    return np.count_nonzero(differs, axis=1)


def interleaved_min_distance(ic: InterleavedCode) -> int:
    """Brute-force minimum row weight over all nonzero codeword grids"""
    zero = MatrixWord.from_array(ic.q, np.zeros((ic.n, ic.m), dtype=np.int64))
    weights = tuple_row_errors(ic, zero)
    return int(weights[1:].min())


def is_block_linear(word: Word, m: int, k: int) -> bool:
    """
    True iff the word, read as a function of (x^(1), ..., x^(m)) with each block
    in GF(q)^k, is a linear functional of every block when the others are fixed.
    """
    q = word.q
    block = q ** k
    if word.n != block ** m:
        raise LengthMismatch(f"Block-linear test needs length q^(mk) = {block ** m}, got {word.n}")
    if word.erasures:
        return False

    field = field_new(q)
    values = word.to_array().reshape((block,) * m)
    points = field.vectors(k)
    unit_positions = [q ** (k - 1 - j) for j in range(k)]

    for axis in range(m):
        slices = np.moveaxis(values, axis, -1).reshape(-1, block)
        coefficients = slices[:, unit_positions]
        predicted = field.matmul(coefficients, points.T)
        if not np.array_equal(predicted, slices):
            return False
    return True


def tensor_codewords_by_membership(c2: LinearCode, c1: LinearCode) -> Set[Tuple[int, ...]]:
    """
    All n2 x n1 matrices with every row in C1 and every column in C2, flattened
    row-major. Enumerates |C1|^n2 row choices, so only for tiny codes.
    """
    rows_book = c1.codebook()
    column_words = {tuple(int(v) for v in row) for row in c2.codebook()}
    combos = len(rows_book) ** c2.n
    limit = config.cap('enumeration')
    if combos > limit:
        raise EnumerationTooLarge(f"{combos} row choices exceed the enumeration cap {limit}")

    found = set()
    for choice in itertools.product(range(len(rows_book)), repeat=c2.n):
        matrix = rows_book[list(choice)]
        if all(tuple(int(v) for v in matrix[:, j]) in column_words for j in range(c1.n)):
            found.add(tuple(int(v) for v in matrix.reshape(-1)))
    return found
