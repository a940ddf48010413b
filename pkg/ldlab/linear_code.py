"""
Linear codes over GF(q) and the brute-force oracles every decoder builds on.

A LinearCode is a full-rank k x n generator matrix. Its codebook (all q^k
codewords, messages in base-q order) is enumerated lazily and cached, so list
decoding at desk scale is a vectorised distance computation against the
codebook. Erasure-aware distances count errors only on positions where both
words carry a symbol; erasures are reported separately.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .datatypes import ERASED_CELL, MatrixWord, Word
from .errors import (
    Ambiguous, DomainError, EnumerationTooLarge, FieldMismatch, LengthMismatch,
    NoCodeword, RankDeficient, TooManyErasures,
)
from .field import Field

logger = logging.getLogger(__name__)

CODEBOOK_CHUNK = 1 << 16
DISTANCE_BLOCK = 1 << 24   # cells compared per vectorised block in max_list_size

Seed = Union[int, Sequence[int], np.random.Generator, None]


def make_rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial `index` of a run seeded with `seed`"""
    return np.random.default_rng([int(seed), int(index)])


class LinearCode:
    """k x n generator matrix over a field, with cached distance and codebook"""

    def __init__(self, field: Field, generator, tag: str,
                 parent: Optional['LinearCode'] = None, kept: Optional[Sequence[int]] = None):
        G = np.array(generator, dtype=np.int64, ndmin=2)
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
            raise ValueError(f"Generator must be a non-empty k x n matrix, got shape {G.shape}")
        if G.min() < 0 or G.max() >= field.q:
            raise ValueError(f"Generator entries must be element encodings 0..{field.q - 1}")

        rank = field.rank(G)
        if rank != G.shape[0]:
            raise RankDeficient(f"{tag}: generator has {G.shape[0]} rows but rank {rank}")

        G.setflags(write=False)
        self.field = field
        self.generator = G
        self.k, self.n = G.shape
        self.tag = tag
        self.parent = parent
        self.kept = tuple(kept) if kept is not None else None
        self.factors: Optional[Tuple['LinearCode', 'LinearCode']] = None   # (c2, c1) for tensor codes

        self._distance: Optional[int] = None
        self._min_weight_index: Optional[int] = None
        self._codebook: Optional[np.ndarray] = None
        self._ghw: Dict[int, Fraction] = {}

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return self.q ** self.k

    @property
    def distance(self) -> int:
        return min_distance(self)

    @property
    def relative_distance(self) -> Fraction:
        return Fraction(min_distance(self), self.n)

    def messages(self) -> np.ndarray:
        return self.field.vectors(self.k)

    def codebook(self) -> np.ndarray:
        """All q^k codewords as rows, in message order (row 0 is the zero word)"""
        if self._codebook is None:
            check_enumeration(self)
            messages = self.messages()
            blocks = [
                self.field.matmul(messages[i:i + CODEBOOK_CHUNK], self.generator)
                for i in range(0, len(messages), CODEBOOK_CHUNK)
            ]
            book = np.vstack(blocks).astype(np.int16)
            book.setflags(write=False)
            self._codebook = book
            logger.debug(f"Enumerated {len(book)} codewords of {self.tag}")
        return self._codebook

    def codeword(self, index: int) -> Word:
        return Word.from_array(self.q, self.codebook()[index])

    def __repr__(self) -> str:
        return f"LinearCode({self.tag}, q={self.q}, n={self.n}, k={self.k})"


def check_enumeration(code: LinearCode, what: str = "codewords") -> None:
    limit = config.cap('enumeration')
    if code.size > limit:
        raise EnumerationTooLarge(
            f"{code.tag}: {code.size} {what} exceed the enumeration cap {limit}; "
            f"set LDLAB_CAP or caps.enumeration to allow it"
        )


def _check_word(code: LinearCode, word: Word) -> None:
    if word.q != code.q:
        raise FieldMismatch(f"Word over GF({word.q}) used with a code over GF({code.q})")
    if word.n != code.n:
        raise LengthMismatch(f"Word has length {word.n}, code {code.tag} has length {code.n}")


def encode(code: LinearCode, message: Sequence[int]) -> Word:
    message = np.asarray(message, dtype=np.int64)
    if message.shape != (code.k,):
        raise LengthMismatch(f"Message has length {message.size}, code {code.tag} has dimension {code.k}")
    return Word.from_array(code.q, code.field.matmul(message[np.newaxis, :], code.generator)[0])


def min_distance(code: LinearCode) -> int:
    """Exact minimum nonzero weight by enumeration; cached on the code"""
    if code._distance is None:
        book = code.codebook()
        weights = np.count_nonzero(book[1:], axis=1)
        index = int(np.argmin(weights))
        code._distance = int(weights[index])
        code._min_weight_index = index + 1
        logger.debug(f"{code.tag}: d = {code._distance}")
    return code._distance


def min_weight_codeword(code: LinearCode) -> Word:
    """First minimum-weight codeword in message order"""
    min_distance(code)
    return code.codeword(code._min_weight_index)


def weight(word: Word) -> int:
    return sum(1 for s in word.symbols if s not in (0, None))


def distance(w1: Word, w2: Word) -> Tuple[int, int]:
    """(errors on mutually unerased positions, positions erased in either word)"""
    if w1.q != w2.q:
        raise FieldMismatch(f"Cannot compare words over GF({w1.q}) and GF({w2.q})")
    if w1.n != w2.n:
        raise LengthMismatch(f"Cannot compare words of lengths {w1.n} and {w2.n}")
    a, b = w1.to_array(), w2.to_array()
    erased = (a == ERASED_CELL) | (b == ERASED_CELL)
    errors = int(np.count_nonzero((a != b) & ~erased))
    return errors, int(np.count_nonzero(erased))


def relative_distance(w1: Word, w2: Word) -> Fraction:
    errors, _ = distance(w1, w2)
    return Fraction(errors, w1.n)


def row_distance(A: MatrixWord, B: MatrixWord) -> Tuple[int, int]:
    """Rows compared as single symbols: one differing cell makes the row differ"""
    if A.shape != B.shape:
        raise LengthMismatch(f"Cannot compare grids of shapes {A.shape} and {B.shape}")
    a, b = A.to_array(), B.to_array()
    erased = np.any((a == ERASED_CELL) | (b == ERASED_CELL), axis=1)
    differs = np.any(a != b, axis=1) & ~erased
    return int(np.count_nonzero(differs)), int(np.count_nonzero(erased))


def puncture(code: LinearCode, S: Iterable[int]) -> LinearCode:
    """C^{-S}: drop the coordinates in S; requires |S| < d"""
    S = sorted(set(int(i) for i in S))
    if S and (S[0] < 0 or S[-1] >= code.n):
        raise ValueError(f"Puncture positions {S} out of range for length {code.n}")
    d = min_distance(code)
    if len(S) >= d:
        raise TooManyErasures(f"Cannot puncture {len(S)} positions from {code.tag} with d = {d}")

    removed = set(S)
    kept = [j for j in range(code.n) if j not in removed]
    punctured = LinearCode(
        code.field, code.generator[:, kept],
        tag=f"{code.tag}^-{{{','.join(map(str, S))}}}" if S else code.tag,
        parent=code, kept=kept,
    )
    if not S:
        punctured._distance = code._distance
        punctured._min_weight_index = code._min_weight_index
    return punctured


def lift(punctured: LinearCode, word: Word) -> Word:
    """Map a codeword of C^{-S} back to the codeword of C it came from"""
    if punctured.parent is None:
        return word
    message = solve_message(punctured, word)
    if message is Ambiguous or message is NoCodeword:
        raise ValueError(f"{word} is not a codeword of {punctured.tag}")
    return lift(punctured.parent, encode(punctured.parent, message))


def solve_message(code: LinearCode, r: Word):
    """
    Solve m.G = r on the unerased coordinates of r by Gaussian elimination.

    Returns the message vector, or the Ambiguous / NoCodeword signal.
    """
    _check_word(code, r)
    values = r.to_array()
    J = np.flatnonzero(values != ERASED_CELL)
    if len(J) == 0:
        return Ambiguous

    augmented = np.hstack([code.generator[:, J].T, values[J][:, np.newaxis]])
    reduced = code.field.row_reduce(augmented)
    k = code.k
    coefficient_zero = np.all(reduced[:, :k] == 0, axis=1)
    if np.any(coefficient_zero & (reduced[:, k] != 0)):
        return NoCodeword
    if np.count_nonzero(~coefficient_zero) < k:
        return Ambiguous
    return reduced[:k, k].copy()


def unique_decode_erasures(code: LinearCode, r: Word):
    """The unique codeword matching r off its erasures, or Ambiguous / NoCodeword"""
    message = solve_message(code, r)
    if message is Ambiguous or message is NoCodeword:
        return message
    return encode(code, message)


def is_codeword(code: LinearCode, word: Word) -> bool:
    if word.erasures:
        return False
    return unique_decode_erasures(code, word) == word


def ball_indices(code: LinearCode, r: Word, radius_errors: int) -> np.ndarray:
    """Message indices within radius of r, sorted by (errors, message order)"""
    _check_word(code, r)
    if radius_errors < 0:
        return np.zeros(0, dtype=np.int64)
    book = code.codebook()
    values = r.to_array()
    live = values != ERASED_CELL
    errors = np.count_nonzero(book[:, live] != values[live], axis=1)
    hits = np.flatnonzero(errors <= radius_errors)
    order = np.lexsort((hits, errors[hits]))
    return hits[order]


def list_decode_brute(code: LinearCode, r: Word, radius_errors: int) -> List[Word]:
    """All codewords with at most radius_errors errors on the unerased positions of r"""
    return [code.codeword(i) for i in ball_indices(code, r, radius_errors)]


def list_decode_erasures(code: LinearCode, r: Word, radius_errors: int) -> List[Word]:
    """Errors-and-erasures list decoding: erased positions of r never count as errors"""
    found = list_decode_brute(code, r, radius_errors)
    logger.debug(f"{code.tag}: {r.erasures} erasures, radius {radius_errors} -> {len(found)} codewords")
    return found


def corrupt(c: Word, error_count: int, seed: Seed = None) -> Word:
    """Change exactly error_count random unerased positions to random different symbols"""
    rng = make_rng(seed)
    values = c.to_array()
    candidates = np.flatnonzero(values != ERASED_CELL)
    if not 0 <= error_count <= len(candidates):
        raise DomainError(f"Cannot place {error_count} errors in a word with {len(candidates)} unerased positions")

    positions = rng.choice(candidates, size=error_count, replace=False)
    for pos in positions:
        # uniform over the q-1 symbols different from the current one
        shift = int(rng.integers(0, c.q - 1))
        values[pos] = shift if shift < values[pos] else shift + 1
    return Word.from_array(c.q, values)


def random_word(q: int, n: int, seed: Seed = None) -> Word:
    return Word.from_array(q, make_rng(seed).integers(0, q, size=n))


def random_codeword(code: LinearCode, seed: Seed = None) -> Word:
    message = make_rng(seed).integers(0, code.q, size=code.k)
    return encode(code, message)


@dataclass
class ListSizeEstimate:
    value: int          # largest ball population found
    radius: int         # absolute radius (errors)
    exhaustive: bool    # True when every received word in GF(q)^n was checked
    words_checked: int


def max_list_size(code: LinearCode, radius_errors: int, seed: Seed = 0) -> ListSizeEstimate:
    """
    l(C, t): the largest number of codewords in any Hamming ball of radius t.

    Exhaustive over all q^n centres when that is within
    caps.exhaustive_received_words, otherwise the maximum over sampled centres.
    """
    book = code.codebook().astype(np.int64)
    if radius_errors < 0:
        return ListSizeEstimate(0, radius_errors, True, 0)
    if radius_errors >= code.n:
        return ListSizeEstimate(len(book), radius_errors, True, 0)

    total = code.q ** code.n
    exhaustive = total <= config.cap('exhaustive_received_words')
    if exhaustive:
        centres = code.field.vectors(code.n)
    else:
        samples = config.cap('sampled_received_words')
        logger.warning(f"{code.tag}: {total} received words is too many, sampling {samples} for the list-size oracle")
        rng = make_rng(seed)
        # half uniform words, half words near codewords where balls are fullest
        uniform = rng.integers(0, code.q, size=(samples - samples // 2, code.n))
        near = book[rng.integers(0, len(book), size=samples // 2)].copy()
        for row in near:
            pos = rng.choice(code.n, size=min(radius_errors, code.n), replace=False)
            row[pos] = rng.integers(0, code.q, size=len(pos))
        centres = np.vstack([uniform, near])

    best = 0
    block = max(1, DISTANCE_BLOCK // max(1, len(book) * code.n))
    for start in range(0, len(centres), block):
        chunk = centres[start:start + block]
        errors = np.count_nonzero(chunk[:, np.newaxis, :] != book[np.newaxis, :, :], axis=2)
        best = max(best, int(np.max(np.count_nonzero(errors <= radius_errors, axis=1))))
    return ListSizeEstimate(best, radius_errors, exhaustive, len(centres))
