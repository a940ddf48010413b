"""
Advice-driven list decoding of tensor codes C2 (x) C1.

A received word is an n2 x n1 grid R whose rows belong (up to noise) to C1
and columns to C2. Each advice string A is a guess of the target codeword on
sampled rows S and columns T; it is refined in four phases:

1. rows in S are list decoded and kept only if a candidate agrees with A on T;
2. every column is list decoded and checked against the phase-1 rows;
3. every row is list decoded and checked against the phase-2 columns;
4. every column is uniquely decoded from the phase-3 rows, erasures included.

A candidate is emitted when it lies within eta* - 3 eps of R, where
eta* = min(delta1 eta2, delta2 eta1). Advice comes either from a planted
codeword (the experimental path) or from enumerating all q^(|S||T|) grids.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .bounds import as_rational, concentration_tail
from .datatypes import ERASED_CELL, MatrixWord, Word
from .errors import (
    AdviceSpaceTooLarge, Ambiguous, DomainError, FieldMismatch, LengthMismatch, NoCodeword, TrivialCode,
)
from .linear_code import (
    LinearCode, ball_indices, is_codeword, make_rng, max_list_size, min_weight_codeword, unique_decode_erasures,
)

logger = logging.getLogger(__name__)

ADVICE_MODES = ('planted', 'enumerate')


@dataclass
class SampleSizes:
    m1: int            # |T|, sampled columns
    m2: int            # |S|, sampled rows
    formula_m1: float
    formula_m2: float
    t_full: bool       # m1 capped at n1
    s_full: bool       # m2 capped at n2

    @property
    def capped(self) -> bool:
        return self.t_full or self.s_full


def sample_sizes(delta1, ell1, ell2, eps, n1: int, n2: int) -> SampleSizes:
    """Ceilings of ln(8 l1/eps)/(2 delta1^2) and ln(8 l2/eps)/(2 eps^2), capped at n1 and n2"""
    e = float(eps)
    formula_m1 = math.log(8 * float(ell1) / e) / (2 * float(delta1) ** 2)
    formula_m2 = math.log(8 * float(ell2) / e) / (2 * e ** 2)
    m1, m2 = math.ceil(formula_m1), math.ceil(formula_m2)
    sizes = SampleSizes(
        m1=min(m1, n1), m2=min(m2, n2),
        formula_m1=formula_m1, formula_m2=formula_m2,
        t_full=m1 >= n1, s_full=m2 >= n2,
    )
    if sizes.capped:
        logger.debug(f"Sample sizes capped: m1 {m1} -> {sizes.m1}, m2 {m2} -> {sizes.m2}")
    return sizes


def success_floor(sizes: SampleSizes, delta1, ell1, ell2, eps) -> float:
    """1 - p(eps, m2) - l1 p(delta1, m1)/eps - l2 p(eps, m2)/eps, full-set terms taken as 0"""
    e = float(eps)
    s_tail = 0.0 if sizes.s_full else concentration_tail(e, sizes.m2)
    t_tail = 0.0 if sizes.t_full else concentration_tail(float(delta1), sizes.m1)
    return 1 - s_tail - float(ell1) * t_tail / e - float(ell2) * s_tail / e


@dataclass
class PhaseState:
    S: Tuple[int, ...]
    T: Tuple[int, ...]
    advice: np.ndarray                 # |S| x |T|
    B: np.ndarray                      # |S| x n1, rows of failed decodes are ERASED_CELL
    D: np.ndarray                      # n2 x n1, failed columns are ERASED_CELL
    E: np.ndarray                      # n2 x n1, failed rows are ERASED_CELL
    b_ok: np.ndarray
    d_ok: np.ndarray
    e_ok: np.ndarray
    output: Optional[MatrixWord] = None

    @property
    def s_success(self) -> Tuple[int, ...]:
        return tuple(s for s, ok in zip(self.S, self.b_ok) if ok)

    @property
    def s_fail(self) -> Tuple[int, ...]:
        return tuple(s for s, ok in zip(self.S, self.b_ok) if not ok)

    @property
    def t_success(self) -> Tuple[int, ...]:
        return tuple(int(t) for t in np.flatnonzero(self.d_ok))

    @property
    def t_fail(self) -> Tuple[int, ...]:
        return tuple(int(t) for t in np.flatnonzero(~self.d_ok))

    @property
    def u_success(self) -> Tuple[int, ...]:
        return tuple(int(s) for s in np.flatnonzero(self.e_ok))

    @property
    def u_fail(self) -> Tuple[int, ...]:
        return tuple(int(s) for s in np.flatnonzero(~self.e_ok))


@dataclass
class TensorDecodeResult:
    codewords: List[MatrixWord]
    sizes: SampleSizes
    eta_star: Fraction
    target: Fraction                   # eta* - 3 eps
    target_errors: int                 # floor(target n1 n2)
    advice_tried: int
    states: List[PhaseState] = field(default_factory=list)   # kept in planted mode only


def _check_tensor_input(c1: LinearCode, c2: LinearCode, R: MatrixWord) -> None:
    if c1.q != c2.q or R.q != c1.q:
        raise FieldMismatch("Row code, column code and received grid must share a field")
    if R.shape != (c2.n, c1.n):
        raise LengthMismatch(f"Received grid has shape {R.shape}, expected n2 x n1 = {(c2.n, c1.n)}")


def _first_match(candidates: np.ndarray, book: np.ndarray, positions: Sequence[int],
                 target: np.ndarray, max_mismatches: Fraction) -> Optional[int]:
    """First candidate (in list order) whose mismatches with target on positions are < max_mismatches"""
    cols = list(positions)
    for t in candidates:
        mismatches = int(np.count_nonzero(book[t, cols] != target)) if cols else 0
        if mismatches < max_mismatches:
            return int(t)
    return None


def _run_phases(c1: LinearCode, c2: LinearCode, R: np.ndarray, S: Tuple[int, ...], T: Tuple[int, ...],
                advice: np.ndarray, row_lists: List[np.ndarray], col_lists: List[np.ndarray],
                eps: Fraction) -> PhaseState:
    n2, n1 = R.shape
    book1 = c1.codebook().astype(np.int64)
    book2 = c2.codebook().astype(np.int64)

    # Phase 1: rows in S must agree with the advice on T exactly
    B = np.full((len(S), n1), ERASED_CELL, dtype=np.int64)
    b_ok = np.zeros(len(S), dtype=bool)
    for i, s in enumerate(S):
        t = _first_match(row_lists[s], book1, T, advice[i], Fraction(1))
        if t is not None:
            B[i], b_ok[i] = book1[t], True

    # Phase 2: columns, fewer than eps|S| disagreements with B on S_success
    S_rows = [i for i in range(len(S)) if b_ok[i]]
    S_success = [S[i] for i in S_rows]
    D = np.full((n2, n1), ERASED_CELL, dtype=np.int64)
    d_ok = np.zeros(n1, dtype=bool)
    for t in range(n1):
        j = _first_match(col_lists[t], book2, S_success, B[S_rows, t], eps * len(S))
        if j is not None:
            D[:, t], d_ok[t] = book2[j], True

    # Phase 3: every row, fewer than eps n1 disagreements with D on T_success
    T_success = np.flatnonzero(d_ok).tolist()
    E = np.full((n2, n1), ERASED_CELL, dtype=np.int64)
    e_ok = np.zeros(n2, dtype=bool)
    for s in range(n2):
        j = _first_match(row_lists[s], book1, T_success, D[s, T_success], eps * n1)
        if j is not None:
            E[s], e_ok[s] = book1[j], True

    state = PhaseState(S, T, advice, B, D, E, b_ok, d_ok, e_ok)

    # Phase 4: unique decoding of each column from the surviving rows
    columns = []
    for t in range(n1):
        word = Word(c2.q, tuple(int(v) if ok else None for v, ok in zip(E[:, t], e_ok)))
        decoded = unique_decode_erasures(c2, word)
        if decoded is Ambiguous or decoded is NoCodeword:
            return state
        columns.append(decoded)
    state.output = MatrixWord.from_columns(columns)
    return state


def tensor_decode(c1: LinearCode, c2: LinearCode, R: MatrixWord, eta1, eta2, eps, seed=0,
                  advice_mode: str = 'planted', planted: Optional[MatrixWord] = None,
                  m1: Optional[int] = None, m2: Optional[int] = None,
                  ell1: Optional[int] = None, ell2: Optional[int] = None) -> TensorDecodeResult:
    """
    List decode R in C2 (x) C1 to radius eta* - 3 eps.

    Rows are decoded at eta1 (C1), columns at eta2 (C2). Sample sizes come
    from sample_sizes unless m1 (|T|) or m2 (|S|) is given. ell1 and ell2
    default to the max_list_size oracle at eta1 and eta2.
    """
    _check_tensor_input(c1, c2, R)
    if advice_mode not in ADVICE_MODES:
        raise DomainError(f"Unknown advice mode '{advice_mode}'; choose one of {ADVICE_MODES}")
    if advice_mode == 'planted' and planted is None:
        raise DomainError("Planted mode needs the planted codeword grid")
    eta1, eta2, eps = as_rational(eta1), as_rational(eta2), as_rational(eps)
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")

    n1, n2 = c1.n, c2.n
    delta1, delta2 = c1.relative_distance, c2.relative_distance
    eta_star = min(delta1 * eta2, delta2 * eta1)
    target = eta_star - 3 * eps
    if target < 0:
        raise DomainError(f"Target radius eta* - 3 eps = {target} is negative (eta* = {eta_star}, eps = {eps})")
    target_errors = math.floor(target * n1 * n2)

    radius1, radius2 = math.floor(eta1 * n1), math.floor(eta2 * n2)
    if ell1 is None:
        ell1 = max(1, max_list_size(c1, radius1, seed=seed).value)
    if ell2 is None:
        ell2 = max(1, max_list_size(c2, radius2, seed=seed).value)

    sizes = sample_sizes(delta1, ell1, ell2, eps, n1, n2)
    if m1 is not None:
        sizes.m1, sizes.t_full = min(m1, n1), m1 >= n1
    if m2 is not None:
        sizes.m2, sizes.s_full = min(m2, n2), m2 >= n2

    rng = make_rng(seed)
    T = tuple(range(n1)) if sizes.t_full else tuple(sorted(int(t) for t in rng.choice(n1, sizes.m1, replace=False)))
    S = tuple(range(n2)) if sizes.s_full else tuple(sorted(int(s) for s in rng.choice(n2, sizes.m2, replace=False)))

    R_values = R.to_array()
    row_lists = [ball_indices(c1, R.row(s), radius1) for s in range(n2)]
    col_lists = [ball_indices(c2, R.column(t), radius2) for t in range(n1)]

    if advice_mode == 'planted':
        if planted.shape != R.shape:
            raise LengthMismatch(f"Planted grid has shape {planted.shape}, expected {R.shape}")
        advice_strings = [planted.to_array()[np.ix_(S, T)]]
    else:
        count = c1.q ** (len(S) * len(T))
        limit = config.cap('advice')
        if count > limit:
            raise AdviceSpaceTooLarge(f"{count} advice strings for |S|={len(S)}, |T|={len(T)} exceed the advice cap {limit}")
        advice_strings = (
            np.array(values, dtype=np.int64).reshape(len(S), len(T))
            for values in itertools.product(range(c1.q), repeat=len(S) * len(T))
        )

    found: Dict[Tuple, MatrixWord] = {}
    states = []
    tried = 0
    live = R_values != ERASED_CELL
    for advice in advice_strings:
        tried += 1
        state = _run_phases(c1, c2, R_values, S, T, advice, row_lists, col_lists, eps)
        if advice_mode == 'planted':
            states.append(state)
        if state.output is None:
            continue
        errors = int(np.count_nonzero((state.output.to_array() != R_values) & live))
        if errors <= target_errors:
            found[state.output.rows] = state.output
        else:
            state.output = None

    codewords = [found[key] for key in sorted(found)]
    logger.info(f"tensor decode ({advice_mode}): {tried} advice strings, {len(codewords)} codewords within {target}")
    return TensorDecodeResult(codewords, sizes, eta_star, target, target_errors, tried, states)


@dataclass
class PhaseDiagnostics:
    S_r: Tuple[int, ...]
    S_w: Tuple[int, ...]
    T_r: Tuple[int, ...]
    T_w: Tuple[int, ...]
    U_1: Tuple[int, ...]
    rows_claim: Dict[str, bool]
    columns_claim: Dict[str, bool]
    final_rows_claim: Dict[str, bool]
    recovered: bool

    @property
    def claims_hold(self) -> bool:
        return all(self.rows_claim.values()) and all(self.columns_claim.values()) and all(self.final_rows_claim.values())

    @property
    def implication_holds(self) -> bool:
        """All phase claims holding forces recovery"""
        return self.recovered or not self.claims_hold


def phase_diagnostics(state: PhaseState, planted: MatrixWord, R: MatrixWord,
                      delta1, delta2, eta1, eps) -> PhaseDiagnostics:
    """Split each phase's successes into correct and wrong against the planted codeword"""
    C = planted.to_array()
    values = R.to_array()
    n2, n1 = C.shape
    delta1, delta2, eta1, eps = (as_rational(x) for x in (delta1, delta2, eta1, eps))

    S_r = tuple(s for i, s in enumerate(state.S) if state.b_ok[i] and np.array_equal(state.B[i], C[s]))
    S_w = tuple(s for s in state.s_success if s not in S_r)
    T_r = tuple(t for t in state.t_success if np.array_equal(state.D[:, t], C[:, t]))
    T_w = tuple(t for t in state.t_success if t not in T_r)
    live = values != ERASED_CELL
    U_1 = tuple(s for s in range(n2) if Fraction(int(np.count_nonzero((C[s] != values[s]) & live[s])), n1) <= eta1)

    size_S = len(state.S)
    rows_claim = {
        'success': len(state.s_success) >= (1 - delta2 + 2 * eps) * size_S,
        'correct': len(S_r) >= (1 - delta2 + eps) * size_S,
        'wrong': len(S_w) <= eps * size_S,
    }
    columns_claim = {
        'success': len(state.t_success) >= (1 - delta1 + 3 * eps) * n1,
        'correct': len(T_r) >= (1 - delta1 + 2 * eps) * n1,
        'wrong': len(T_w) <= eps * n1,
    }
    final_rows_claim = {
        'all_correct': all(np.array_equal(state.E[s], C[s]) for s in state.u_success),
        'success': len(state.u_success) >= (1 - delta2 + 3 * eps) * n2,
    }
    recovered = state.output is not None and state.output == planted
    return PhaseDiagnostics(S_r, S_w, T_r, T_w, U_1, rows_claim, columns_claim, final_rows_claim, recovered)


def tensor_lower_witness(c: LinearCode, r: Word, codewords: Sequence[Word]) -> Tuple[MatrixWord, List[MatrixWord]]:
    """
    R' = c0 (x) r and the grids c0 (x) c_i, with c0 a minimum-weight codeword.

    Row i of each grid is c0[i] times the word, so grids agree with R' off
    Supp(c0) and the relative distance scales by delta.
    """
    if c.size < 2:
        raise TrivialCode(f"{c.tag} has a single codeword")
    field_ = c.field
    c0 = min_weight_codeword(c).to_array()

    def outer(word: Word) -> MatrixWord:
        w = word.to_array()
        if np.any(w == ERASED_CELL):
            raise DomainError("Witness words must be erasure-free")
        return MatrixWord.from_array(c.q, field_.mul_arrays(c0[:, np.newaxis], w[np.newaxis, :]))

    return outer(r), [outer(w) for w in codewords]


def is_tensor_codeword(c2: LinearCode, c1: LinearCode, grid: MatrixWord) -> bool:
    """Rows in C1 and columns in C2, checked directly"""
    return (all(is_codeword(c1, grid.row(i)) for i in range(grid.n_rows))
            and all(is_codeword(c2, grid.column(j)) for j in range(grid.n_cols)))
