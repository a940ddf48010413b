"""
Rank-structured list decoding of linear transformations Lin(F_q, k, m).

A transform is a k x m matrix M, encoded as the table x -> x^T M over all x
in GF(q)^k (base-q order). That table is exactly an m-wise interleaved
Hadamard codeword, so every decoder here can be checked against the
interleaved brute-force ball.

Received tables may carry erased rows. Unlike the puncturing view used for
interleaved codes, an erased row here always counts as a disagreement: the
distance between a table R and a transform L is the fraction of x with
R(x) erased or R(x) != L(x).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .bounds import as_rational
from .datatypes import ERASED_CELL, MatrixWord, Word
from .errors import DomainError, LengthMismatch
from .families import InterleavedCode, hadamard, tuple_row_errors
from .field import Field, field_new
from .interleaved_decode import decode_naive_indices
from .linear_code import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinTransform:
    q: int
    matrix: Tuple[Tuple[int, ...], ...]     # k x m

    @classmethod
    def from_array(cls, q: int, M) -> 'LinTransform':
        M = np.asarray(M, dtype=np.int64)
        if M.ndim != 2:
            raise LengthMismatch(f"A transform needs a k x m matrix, got shape {M.shape}")
        return cls(q, tuple(tuple(int(v) for v in row) for row in M))

    @classmethod
    def zero(cls, q: int, k: int, m: int) -> 'LinTransform':
        return cls.from_array(q, np.zeros((k, m), dtype=np.int64))

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def m(self) -> int:
        return len(self.matrix[0])

    @property
    def field(self) -> Field:
        return field_new(self.q)

    def to_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def table(self) -> np.ndarray:
        """q^k x m array whose row x is x^T M"""
        return self.field.matmul(self.field.vectors(self.k), self.to_array())

    @property
    def rank(self) -> int:
        return self.field.rank(self.to_array())

    def __str__(self) -> str:
        return '\n'.join(' '.join(str(v) for v in row) for row in self.matrix)


@dataclass(frozen=True)
class ReceivedTable:
    q: int
    k: int
    m: int
    values: Tuple[Tuple[Optional[int], ...], ...]   # q^k rows; a row of None is an erasure

    @classmethod
    def from_array(cls, q: int, k: int, values) -> 'ReceivedTable':
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 2 or values.shape[0] != q ** k:
            raise LengthMismatch(f"A received table over GF({q})^{k} needs {q ** k} rows, got shape {values.shape}")
        rows = tuple(
            tuple([None] * values.shape[1]) if np.any(row == ERASED_CELL) else tuple(int(v) for v in row)
            for row in values
        )
        return cls(q, k, values.shape[1], rows)

    @classmethod
    def from_transform(cls, L: LinTransform) -> 'ReceivedTable':
        return cls.from_array(L.q, L.k, L.table())

    def to_array(self) -> np.ndarray:
        return np.array([[ERASED_CELL if v is None else v for v in row] for row in self.values], dtype=np.int64)

    def to_grid(self) -> MatrixWord:
        return MatrixWord(self.q, self.values)

    @property
    def n(self) -> int:
        return self.q ** self.k

    @property
    def erased(self) -> np.ndarray:
        return np.any(self.to_array() == ERASED_CELL, axis=1)


def noisy_table(L: LinTransform, error_rows: int, seed=None, erased_rows: int = 0) -> ReceivedTable:
    """Table of L with error_rows rows replaced by different random values and erased_rows rows erased"""
    rng = make_rng(seed)
    values = L.table()
    n = len(values)
    if error_rows + erased_rows > n:
        raise DomainError(f"Cannot corrupt {error_rows + erased_rows} rows of a {n}-row table")
    positions = rng.choice(n, size=error_rows + erased_rows, replace=False)
    for x in positions[:error_rows]:
        # uniform over the q^m - 1 row values different from the current one
        current = int(_row_codes(values[x:x + 1], L.q)[0])
        shift = int(rng.integers(0, L.q ** L.m - 1))
        code = shift if shift < current else shift + 1
        values[x] = _decode_row(code, L.q, L.m)
    values[positions[error_rows:]] = ERASED_CELL
    return ReceivedTable.from_array(L.q, L.k, values)


def random_transform(q: int, k: int, m: int, rank: Optional[int] = None, seed=None) -> LinTransform:
    """Uniform k x m matrix, or a uniform product U V of the requested rank"""
    rng = make_rng(seed)
    field = field_new(q)
    if rank is None:
        return LinTransform.from_array(q, rng.integers(0, q, size=(k, m)))
    if not 0 <= rank <= min(k, m):
        raise DomainError(f"Rank {rank} is impossible for a {k} x {m} matrix")
    if rank == 0:
        return LinTransform.zero(q, k, m)
    while True:
        M = field.matmul(rng.integers(0, q, size=(k, rank)), rng.integers(0, q, size=(rank, m)))
        if field.rank(M) == rank:
            return LinTransform.from_array(q, M)


def _row_codes(values: np.ndarray, q: int) -> np.ndarray:
    """Base-q integer of each row, first coordinate most significant; erased rows map to -1"""
    m = values.shape[1]
    powers = q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    codes = values @ powers
    codes[np.any(values == ERASED_CELL, axis=1)] = -1
    return codes


def _decode_row(code: int, q: int, m: int) -> np.ndarray:
    return np.array([(code // q ** (m - 1 - j)) % q for j in range(m)], dtype=np.int64)


def table_distance(R: ReceivedTable, L: LinTransform) -> Fraction:
    """Fraction of x with R(x) erased or different from x^T M"""
    values = R.to_array()
    differs = np.any(values != L.table(), axis=1)
    return Fraction(int(np.count_nonzero(differs)), R.n)


def rank_decompose(L: LinTransform) -> Tuple[int, np.ndarray, np.ndarray]:
    """
    (r, U, V) with U a k x r basis of the column span, V an r x m basis of the
    row span (the nonzero rows of the RREF) and U V = M.
    """
    field = L.field
    M = L.to_array()
    reduced = field.row_reduce(M)
    nonzero = np.any(reduced != 0, axis=1)
    V = reduced[nonzero]
    r = len(V)
    if r == 0:
        return 0, np.zeros((L.k, 0), dtype=np.int64), np.zeros((0, L.m), dtype=np.int64)
    pivots = [int(np.flatnonzero(row)[0]) for row in V]
    U = M[:, pivots]
    if not np.array_equal(field.matmul(U, V), M):
        raise RuntimeError(f"Rank decomposition failed to reproduce M for {L}")  # unreachable
    return r, U, V


def row_span(L: LinTransform) -> np.ndarray:
    """All q^r vectors of the row span, zero first"""
    r, _, V = rank_decompose(L)
    if r == 0:
        return np.zeros((1, L.m), dtype=np.int64)
    return L.field.matmul(L.field.vectors(r), V)


def weight_profile(R: ReceivedTable, v: Sequence[int]) -> Fraction:
    """
    wt(R, v) = sum over nonzero mu of Pr_x[R(x) = mu v].

    For v = 0 this is Pr_x[R(x) = 0]. Over GF(2) it is Pr_x[R(x) = v].
    """
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (R.m,):
        raise LengthMismatch(f"Weight vector has length {v.size}, table has width {R.m}")
    codes = _row_codes(R.to_array(), R.q)
    if not np.any(v):
        return Fraction(int(np.count_nonzero(codes == 0)), R.n)
    field = field_new(R.q)
    multiples = field.mul_arrays(field.nonzero_elements()[:, np.newaxis], v[np.newaxis, :])
    targets = _row_codes(multiples, R.q)
    return Fraction(int(np.count_nonzero(np.isin(codes, targets))), R.n)


def _weights_by_code(R: ReceivedTable) -> Dict[int, int]:
    """Occurrence count of every unerased row value, keyed by its base-q code"""
    codes = _row_codes(R.to_array(), R.q)
    codes = codes[codes >= 0]
    unique, counts = np.unique(codes, return_counts=True)
    return {int(u): int(c) for u, c in zip(unique, counts)}


# Hadamard decoding with erasures counted as disagreements

_hadamard_books: Dict[Tuple[int, int], np.ndarray] = {}


def _hadamard_book(q: int, k: int) -> np.ndarray:
    if (q, k) not in _hadamard_books:
        _hadamard_books[(q, k)] = hadamard(q, k).codebook().astype(np.int64)
    return _hadamard_books[(q, k)]


def _hadamard_list(q: int, k: int, word: np.ndarray, radius: Fraction, strict: bool) -> np.ndarray:
    """Message indices a with (erasures + disagreements)/q^k below (or at) radius"""
    book = _hadamard_book(q, k)
    n = q ** k
    differs = np.count_nonzero((book != word) | (word == ERASED_CELL), axis=1)
    limit = Fraction(radius) * n
    scaled = differs * limit.denominator
    keep = scaled < limit.numerator if strict else scaled <= limit.numerator
    hits = np.flatnonzero(keep)
    order = np.lexsort((hits, differs[hits]))
    return hits[order]


@dataclass
class HadamardErasureResult:
    messages: List[int]              # base-q message indices of the codewords found
    erasure_fraction: Fraction       # eta
    bound: Optional[float]           # 2/(eta + 2 eps)^2; None for the all-erased word
    holds: Optional[bool]


def hadamard_decode_erasures(r: Word, eps, strict: bool = True) -> HadamardErasureResult:
    """
    Binary Hadamard codewords whose disagreement with r, erasures included, is
    below 1/2 - eps (at most, when strict is False). The list is compared
    with 2/(eta + 2 eps)^2 unless every position is erased.
    """
    if r.q != 2:
        raise DomainError(f"Binary Hadamard decoding needs GF(2) words, got GF({r.q})")
    k = r.n.bit_length() - 1
    if 2 ** k != r.n:
        raise LengthMismatch(f"Hadamard words have length 2^k, got {r.n}")
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")

    hits = _hadamard_list(2, k, r.to_array(), Fraction(1, 2) - eps, strict)
    eta = Fraction(r.erasures, r.n)
    if eta == 1:
        return HadamardErasureResult(hits.tolist(), eta, None, None)
    bound = 2 / float(eta + 2 * eps) ** 2
    return HadamardErasureResult(hits.tolist(), eta, bound, len(hits) <= bound)


def _index_to_vector(index: int, q: int, k: int) -> np.ndarray:
    return _decode_row(index, q, k)


def _finalize(R: ReceivedTable, found: Iterable[LinTransform], radius: Fraction) -> List[LinTransform]:
    unique = {L.matrix: L for L in found}
    within = [(table_distance(R, L), key, L) for key, L in unique.items()]
    within = [item for item in within if item[0] <= radius]
    within.sort(key=lambda item: (item[0], item[1]))
    return [L for _, _, L in within]


def _binary_only(R: ReceivedTable, what: str) -> None:
    if R.q != 2:
        raise DomainError(f"{what} decodes transforms over GF(2); use decode_rank1_q for GF({R.q})")


def decode_rank1(R: ReceivedTable, eps) -> List[LinTransform]:
    """Every transform of rank at most 1 within 1/2 - eps of R"""
    _binary_only(R, 'decode_rank1')
    eps = as_rational(eps)
    radius = Fraction(1, 2) - eps
    codes = _row_codes(R.to_array(), 2)
    found = [LinTransform.zero(2, R.k, R.m)]

    for code, count in _weights_by_code(R).items():
        if code == 0 or Fraction(count, R.n) < eps:
            continue
        v = _decode_row(code, 2, R.m)
        # 0 where R(x) = 0, 1 where R(x) = v, erased elsewhere
        word = np.where(codes == 0, 0, np.where(codes == code, 1, ERASED_CELL))
        result = hadamard_decode_erasures(Word.from_array(2, word), eps, strict=False)
        for a in result.messages:
            found.append(LinTransform.from_array(2, np.outer(_index_to_vector(a, 2, R.k), v)))

    out = _finalize(R, found, radius)
    logger.debug(f"rank-1 decode at 1/2 - {eps}: {len(out)} transforms")
    return out


def decode_rank2(R: ReceivedTable, eps) -> List[LinTransform]:
    """
    Every transform of rank at most 2 within 1/2 - eps of R.

    For each pair {u, v} of vectors with weight at least eps/2, R is rewritten
    as a Lin(F2, k, 2) table (coefficients of R(x) in the basis u, v, erased
    outside their span) and decoded one column at a time: the second column
    is decoded only after erasing where the first column's candidate
    disagrees.
    """
    _binary_only(R, 'decode_rank2')
    eps = as_rational(eps)
    radius = Fraction(1, 2) - eps
    codes = _row_codes(R.to_array(), 2)
    heavy = sorted(c for c, count in _weights_by_code(R).items() if c != 0 and Fraction(count, R.n) >= eps / 2)
    found = list(decode_rank1(R, eps))

    for u_code, v_code in itertools.combinations(heavy, 2):
        u, v = _decode_row(u_code, 2, R.m), _decode_row(v_code, 2, R.m)
        sum_code = u_code ^ v_code
        first = np.full(R.n, ERASED_CELL, dtype=np.int64)
        second = np.full(R.n, ERASED_CELL, dtype=np.int64)
        for value, (lam, mu) in ((0, (0, 0)), (u_code, (1, 0)), (v_code, (0, 1)), (sum_code, (1, 1))):
            at = codes == value
            first[at], second[at] = lam, mu

        book = _hadamard_book(2, R.k)
        for a1 in _hadamard_list(2, R.k, first, radius, strict=False):
            erase = (book[a1] != first) | (first == ERASED_CELL)
            second_word = np.where(erase, ERASED_CELL, second)
            for a2 in _hadamard_list(2, R.k, second_word, radius, strict=False):
                x1, x2 = _index_to_vector(int(a1), 2, R.k), _index_to_vector(int(a2), 2, R.k)
                M = (np.outer(x1, u) + np.outer(x2, v)) % 2
                found.append(LinTransform.from_array(2, M))

    out = _finalize(R, found, radius)
    logger.debug(f"rank-2 decode at 1/2 - {eps}: {len(heavy)} heavy vectors, {len(out)} transforms")
    return out


def _indices_to_transform(q: int, k: int, indices: Sequence[int]) -> LinTransform:
    """Column j of M is the Hadamard message with index indices[j]"""
    columns = [_index_to_vector(int(t), q, k) for t in indices]
    return LinTransform.from_array(q, np.stack(columns, axis=1))


@dataclass
class FullDecodeResult:
    transforms: List[LinTransform]
    rank2_matches: bool              # rank <= 2 sublist equals decode_rank2
    observed_constant: float         # |list| eps^2


def decode_full(R: ReceivedTable, eps) -> FullDecodeResult:
    """All transforms within 1/2 - eps via column-by-column interleaved Hadamard decoding"""
    _binary_only(R, 'decode_full')
    eps = as_rational(eps)
    radius = Fraction(1, 2) - eps
    ic = InterleavedCode(hadamard(2, R.k), R.m)
    # erased rows always count, so decode the unerased rows against a budget reduced by their number
    erased = int(np.count_nonzero(R.erased))
    budget = Fraction(math.floor(radius * R.n) - erased, R.n)
    found = []
    if budget >= 0:
        found = [_indices_to_transform(2, R.k, t) for t in decode_naive_indices(ic, R.to_grid(), budget)]
    transforms = _finalize(R, found, radius)

    low_rank = {L.matrix for L in transforms if L.rank <= 2}
    rank2 = {L.matrix for L in decode_rank2(R, eps)}
    return FullDecodeResult(transforms, low_rank == rank2, len(transforms) * float(eps) ** 2)


def canonical_directions(q: int, m: int) -> np.ndarray:
    """Projective representatives: nonzero vectors whose first nonzero coordinate is 1"""
    vectors = field_new(q).vectors(m)[1:]
    leading = vectors[np.arange(len(vectors)), np.argmax(vectors != 0, axis=1)]
    return vectors[leading == 1]


def decode_rank1_q(R: ReceivedTable, eps) -> List[LinTransform]:
    """Every transform of rank at most 1 within 1 - 1/q - eps of R over GF(q)"""
    eps = as_rational(eps)
    q = R.q
    radius = 1 - Fraction(1, q) - eps
    field = field_new(q)
    codes = _row_codes(R.to_array(), q)
    found = [LinTransform.zero(q, R.k, R.m)]

    for v in canonical_directions(q, R.m):
        if weight_profile(R, v) < eps:
            continue
        # mu where R(x) = mu v, erased where R(x) leaves the line through v
        word = np.full(R.n, ERASED_CELL, dtype=np.int64)
        line = _row_codes(field.mul_arrays(np.arange(q)[:, np.newaxis], v[np.newaxis, :]), q)
        for mu, code in enumerate(line):
            word[codes == code] = mu
        for a in _hadamard_list(q, R.k, word, radius, strict=False):
            a_vec = _index_to_vector(int(a), q, R.k)
            found.append(LinTransform.from_array(q, field.mul_arrays(a_vec[:, np.newaxis], v[np.newaxis, :])))

    out = _finalize(R, found, radius)
    logger.debug(f"GF({q}) rank-1 decode at 1 - 1/q - {eps}: {len(out)} transforms")
    return out


def lin_ball(R: ReceivedTable, radius, max_rank: Optional[int] = None) -> List[LinTransform]:
    """All q^(km) transforms within radius of R (erased rows counted), optionally rank-filtered"""
    radius = as_rational(radius)
    ic = InterleavedCode(hadamard(R.q, R.k), R.m)
    errors = tuple_row_errors(ic, R.to_grid()) + int(np.count_nonzero(R.erased))
    hits = np.flatnonzero(errors <= math.floor(radius * R.n))
    shape = (ic.base.size,) * R.m
    found = [_indices_to_transform(R.q, R.k, np.unravel_index(int(t), shape)) for t in hits]
    if max_rank is not None:
        found = [L for L in found if L.rank <= max_rank]
    return _finalize(R, found, radius)


# Heavy bases of low-rank ball members

def heavy_span_vectors(R: ReceivedTable, eps, r: int) -> List[int]:
    """Codes of the nonzero b with wt(R, b) >= eps 2^(1-r), GF(2) only"""
    _binary_only(R, 'heavy_span_vectors')
    threshold = as_rational(eps) * Fraction(2) ** (1 - r)
    return sorted(c for c, count in _weights_by_code(R).items() if c != 0 and Fraction(count, R.n) >= threshold)


def _binary_span(vectors: Sequence[int]) -> set:
    span = {0}
    for v in vectors:
        span |= {s ^ v for s in span}
    return span


def heavy_basis_count(heavy: Sequence[int], r: int) -> int:
    """Ordered linearly independent r-tuples drawn from the heavy vectors"""
    def extend(chosen: List[int], span: set) -> int:
        if len(chosen) == r:
            return 1
        total = 0
        for v in heavy:
            if v not in span:
                total += extend(chosen + [v], span | {s ^ v for s in span})
        return total
    return extend([], {0})


def heavy_basis_limit(eps, r: int) -> float:
    """2^(r^2) eps^-r"""
    return 2.0 ** (r * r) * float(eps) ** -r


def has_heavy_basis(L: LinTransform, heavy: Sequence[int]) -> bool:
    """True iff the heavy vectors inside RowSpan(L) span it"""
    span = {int(c) for c in _row_codes(row_span(L), 2)}
    inside = [h for h in heavy if h in span]
    return len(_binary_span(inside)) == len(span)
