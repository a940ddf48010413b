from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

Rational = Fraction     # exact radii, weights and distances
Symbol = Optional[int]  # base-p integer encoding, None marks an erasure

ERASED_CELL = -1        # erasure mark inside numpy arrays


def _as_symbol(value, q: int) -> Symbol:
    if value is None:
        return None
    v = int(value)
    if v == ERASED_CELL:
        return None
    if not 0 <= v < q:
        raise ValueError(f"Symbol {v} is not an element encoding of GF({q}) (expected 0..{q - 1})")
    return v


@dataclass(frozen=True)
class Word:
    q: int                        # field order
    symbols: Tuple[Symbol, ...]   # length n, None = erasure

    def __post_init__(self):
        symbols = tuple(_as_symbol(s, self.q) for s in self.symbols)
        if len(symbols) < 1:
            raise ValueError("A word needs at least one symbol")
        object.__setattr__(self, 'symbols', symbols)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def erasures(self) -> int:
        return sum(1 for s in self.symbols if s is None)

    @property
    def erased_positions(self) -> Tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.symbols) if s is None)

    def to_array(self) -> np.ndarray:
        return np.array([ERASED_CELL if s is None else s for s in self.symbols], dtype=np.int64)

    @classmethod
    def from_array(cls, q: int, values: Iterable) -> 'Word':
        return cls(q, tuple(np.asarray(values, dtype=np.int64).tolist()))

    @classmethod
    def zeros(cls, q: int, n: int) -> 'Word':
        return cls(q, (0,) * n)

    def erase(self, positions: Iterable[int]) -> 'Word':
        """Copy of this word with the given positions marked erased"""
        erased = set(positions)
        return Word(self.q, tuple(None if i in erased else s for i, s in enumerate(self.symbols)))

    def restrict(self, positions: Sequence[int]) -> 'Word':
        return Word(self.q, tuple(self.symbols[i] for i in positions))

    def __str__(self) -> str:
        return ' '.join('*' if s is None else str(s) for s in self.symbols)


@dataclass(frozen=True)
class MatrixWord:
    q: int
    rows: Tuple[Tuple[Symbol, ...], ...]   # n_rows x n_cols, None = erased cell

    def __post_init__(self):
        rows = tuple(tuple(_as_symbol(s, self.q) for s in row) for row in self.rows)
        if not rows or not rows[0]:
            raise ValueError("A matrix word needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("All rows of a matrix word must have the same length")
        object.__setattr__(self, 'rows', rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    def to_array(self) -> np.ndarray:
        return np.array([[ERASED_CELL if s is None else s for s in row] for row in self.rows], dtype=np.int64)

    @classmethod
    def from_array(cls, q: int, values) -> 'MatrixWord':
        return cls(q, tuple(tuple(row) for row in np.asarray(values, dtype=np.int64).tolist()))

    @classmethod
    def from_columns(cls, columns: Sequence[Word]) -> 'MatrixWord':
        q = columns[0].q
        return cls(q, tuple(zip(*(c.symbols for c in columns))))

    @classmethod
    def from_flat(cls, word: Word, n_rows: int, n_cols: int) -> 'MatrixWord':
        """Row-major unflattening (rows indexed first)"""
        if word.n != n_rows * n_cols:
            raise ValueError(f"Cannot reshape a length-{word.n} word into {n_rows}x{n_cols}")
        s = word.symbols
        return cls(word.q, tuple(s[i * n_cols:(i + 1) * n_cols] for i in range(n_rows)))

    def row(self, i: int) -> Word:
        return Word(self.q, self.rows[i])

    def column(self, j: int) -> Word:
        return Word(self.q, tuple(row[j] for row in self.rows))

    def columns(self) -> List[Word]:
        return [self.column(j) for j in range(self.n_cols)]

    def flatten(self) -> Word:
        return Word(self.q, tuple(s for row in self.rows for s in row))

    def __str__(self) -> str:
        return '\n'.join(' '.join('*' if s is None else str(s) for s in row) for row in self.rows)


@dataclass
class BoundReport:
    name: str                         # registry key in bounds.BOUNDS
    params: Dict[str, Any]            # exactly the keyword arguments the bound was called with
    value: Any                        # Fraction, int or float
    formula: str                      # human-readable closed form
    log_base: str = '2'               # '2' or 'e' for the logarithms inside the formula
    details: Dict[str, Any] = field(default_factory=dict)
    holds: Optional[bool] = None      # for bounds that assert an inequality


@dataclass
class ExperimentSpec:
    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None         # None takes the seed from experiments.yaml
    trials: Optional[int] = None
    output: Optional[Path] = None
    csv_output: Optional[Path] = None


@dataclass
class ExperimentReport:
    name: str
    inputs: Dict[str, Any]
    trials: List[Dict[str, Any]]
    aggregates: Dict[str, Any]
    verdicts: Dict[str, bool]
    timestamp: str = ''
    sweep: Optional[List[Dict[str, Any]]] = None   # flat rows for CSV export

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())
