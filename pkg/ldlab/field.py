"""
Finite fields GF(q) for prime and prime-power q.

Elements are integers 0..q-1: the base-p integer whose digits are the
polynomial coefficients, highest degree first. This is the same integer
representation the galois package uses, so galois FieldArrays carry all
vector and matrix work.

The reduction polynomial is the first monic irreducible polynomial of degree e
in base-p integer order, found by trial division, so element encodings do not
depend on the galois version's default choice.
"""

import itertools
import logging
from functools import lru_cache
from typing import Iterable, Tuple

import galois
import numpy as np

from . import config
from .errors import DivisionByZero, NotPrimePower, OrderTooLarge

logger = logging.getLogger(__name__)

# Exhaustive construction-time verification up to this order
EXHAUSTIVE_VERIFY_ORDER = 256


def _prime_power(q: int) -> Tuple[int, int]:
    if q < 2:
        raise NotPrimePower(f"q={q} is not a prime power (need q = p^e with p prime, e >= 1)")
    primes, exponents = galois.factors(q)
    if len(primes) != 1:
        raise NotPrimePower(f"q={q} is not a prime power: factors {dict(zip(primes, exponents))}")
    return int(primes[0]), int(exponents[0])


def _monic_polys(p: int, degree: int, prime_field) -> Iterable:
    """All monic polynomials of the given degree, in base-p integer order"""
    start = p ** degree
    for value in range(start, 2 * start):
        yield galois.Poly.Int(value, field=prime_field)


def is_irreducible_by_trial_division(poly, p: int) -> bool:
    """Trial division against every monic polynomial of degree 1..deg/2"""
    prime_field = galois.GF(p)
    for degree in range(1, poly.degree // 2 + 1):
        for divisor in _monic_polys(p, degree, prime_field):
            if int(poly % divisor) == 0:
                return False
    return True


def first_irreducible(p: int, e: int):
    """First monic irreducible polynomial of degree e over GF(p)"""
    prime_field = galois.GF(p)
    for candidate in _monic_polys(p, e, prime_field):
        if is_irreducible_by_trial_division(candidate, p):
            return candidate
    raise RuntimeError(f"No irreducible polynomial of degree {e} over GF({p})")  # unreachable


def _plain(values) -> np.ndarray:
    return np.asarray(np.asarray(values).view(np.ndarray), dtype=np.int64)


class Field:
    """GF(q) with integer-encoded elements; immutable once built"""

    def __init__(self, q: int):
        p, e = _prime_power(q)
        limit = config.cap('field_order')
        if q > limit:
            raise OrderTooLarge(f"GF({q}) exceeds the field cap of {limit}; raise caps.field_order in lab_config.yaml")

        self.q = q
        self.p = p
        self.e = e

        if e == 1:
            self.reduction_poly = (1, 0)
            self.GF = galois.GF(p)
        else:
            poly = first_irreducible(p, e)
            self.reduction_poly = tuple(int(c) for c in poly.coeffs)
            self.GF = galois.GF(q, irreducible_poly=poly)

        if q <= EXHAUSTIVE_VERIFY_ORDER:
            self._verify_inverses()
        logger.debug(f"Built GF({q}) = GF({p}^{e}) with reduction polynomial {self.reduction_poly_str}")

    def _verify_inverses(self) -> None:
        elements = self.GF.elements
        table = elements[:, np.newaxis] * elements[np.newaxis, :]
        ones_per_row = np.sum(_plain(table[1:]) == 1, axis=1)
        if not np.all(ones_per_row == 1):
            raise RuntimeError(f"GF({self.q}) failed the inverse check; reduction polynomial {self.reduction_poly} is not irreducible")

    @property
    def reduction_poly_str(self) -> str:
        terms = []
        degree = len(self.reduction_poly) - 1
        for i, c in enumerate(self.reduction_poly):
            power = degree - i
            if c == 0:
                continue
            coeff = '' if (c == 1 and power > 0) else str(c)
            if power == 0:
                terms.append(str(c))
            elif power == 1:
                terms.append(f"{coeff}x")
            else:
                terms.append(f"{coeff}x^{power}")
        return ' + '.join(terms)

    def __repr__(self) -> str:
        return f"Field(q={self.q})"

    def _element(self, a: int):
        a = int(a)
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element encoding of GF({self.q})")
        return self.GF(a)

    # Scalar operations on integer encodings

    def add(self, a: int, b: int) -> int:
        return int(self._element(a) + self._element(b))

    def sub(self, a: int, b: int) -> int:
        return int(self._element(a) - self._element(b))

    def mul(self, a: int, b: int) -> int:
        return int(self._element(a) * self._element(b))

    def neg(self, a: int) -> int:
        return int(-self._element(a))

    def inv(self, a: int) -> int:
        if int(a) == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        return int(self._element(a) ** -1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if int(a) == 0 and n < 0:
            raise DivisionByZero(f"0 raised to a negative power in GF({self.q})")
        return int(self._element(a) ** int(n))

    # Array helpers; inputs and outputs are plain int64 arrays

    def array(self, values):
        return self.GF(np.asarray(values, dtype=np.int64))

    def matmul(self, a, b) -> np.ndarray:
        return _plain(self.array(a) @ self.array(b))

    def add_arrays(self, a, b) -> np.ndarray:
        return _plain(self.array(a) + self.array(b))

    def sub_arrays(self, a, b) -> np.ndarray:
        return _plain(self.array(a) - self.array(b))

    def mul_arrays(self, a, b) -> np.ndarray:
        return _plain(self.array(a) * self.array(b))

    def rank(self, matrix) -> int:
        matrix = np.asarray(matrix, dtype=np.int64)
        if matrix.size == 0:
            return 0
        return int(np.linalg.matrix_rank(self.array(matrix)))

    def row_reduce(self, matrix) -> np.ndarray:
        return _plain(self.array(matrix).row_reduce())

    def nonzero_elements(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    def vectors(self, length: int) -> np.ndarray:
        """All of GF(q)^length in base-q order, first coordinate most significant"""
        if length == 0:
            return np.zeros((1, 0), dtype=np.int64)
        return np.array(list(itertools.product(range(self.q), repeat=length)), dtype=np.int64)


@lru_cache(maxsize=None)
def field_new(q: int) -> Field:
    """Cached constructor; one Field object per order"""
    return Field(q)
