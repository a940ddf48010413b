"""
Closed-form list-size bounds and the numeric checks around them.

Exact quantities (b, r, generalized Hamming weights, their lower bound) are
computed with fractions.Fraction. Formulas involving square roots, logs or
huge powers are evaluated in floats, in log space where they would overflow.
Float comparisons that land within tolerances.float_abs are re-evaluated with
60-digit decimals.

All logarithms are base 2 except in the tensor formulas, whose `ln` is natural;
each BoundReport records which one it used.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from . import config
from .datatypes import BoundReport, MatrixWord, Word
from .errors import DomainError, EnumerationTooLarge, MExceedsN, MNotPowerOfTwo
from .field import field_new
from .linear_code import LinearCode, list_decode_brute, make_rng, max_list_size, trial_rng

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction, Decimal]

HIGH_PRECISION_DIGITS = 60
JOHNSON_VARIANTS = ('alphabet_free', 'binary', 'q_ary')

BOUNDS: Dict[str, Callable[..., BoundReport]] = {}


def _bound(name: str):
    def register(fn):
        BOUNDS[name] = fn
        return fn
    return register


def recompute(report: BoundReport) -> bool:
    """True iff re-evaluating the report from its stored parameters gives the same value"""
    fresh = BOUNDS[report.name](**report.params)
    if isinstance(report.value, float) and math.isnan(report.value):
        return isinstance(fresh.value, float) and math.isnan(fresh.value)
    return fresh.value == report.value and fresh.details == report.details


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Decimal):
        return Fraction(x)
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


def _as_float(x) -> float:
    return float(x)


def _as_decimal(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, (Fraction, int)):
        f = Fraction(x)
        return Decimal(f.numerator) / Decimal(f.denominator)
    return Decimal(repr(float(x)))


def ceil_log2(x) -> int:
    """Smallest r >= 0 with 2^r >= x, exact for rationals"""
    x = as_rational(x)
    if x <= 0:
        raise DomainError(f"log2 of a non-positive number {x}")
    r = 0
    while Fraction(2) ** r < x:
        r += 1
    return r


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _exp_or_inf(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def _sqrt(x):
    if isinstance(x, Decimal):
        return x.sqrt()
    return math.sqrt(max(0.0, x))


def strictly_less(lhs: Callable, rhs: Callable, *args) -> bool:
    """lhs(*args) < rhs(*args); float first, 60-digit decimals near ties"""
    tol = config.tolerance('float_abs')
    a = lhs(*[_as_float(x) for x in args])
    b = rhs(*[_as_float(x) for x in args])
    if abs(a - b) > tol:
        return a < b
    with localcontext() as ctx:
        ctx.prec = HIGH_PRECISION_DIGITS
        return lhs(*[_as_decimal(x) for x in args]) < rhs(*[_as_decimal(x) for x in args])


# Johnson radii

def _check_johnson_domain(delta, variant: str, q: Optional[int]) -> None:
    if variant not in JOHNSON_VARIANTS:
        raise DomainError(f"Unknown Johnson variant '{variant}'; choose one of {JOHNSON_VARIANTS}")
    d = as_rational(delta) if not isinstance(delta, float) else delta
    if d < 0 or d > 1:
        raise DomainError(f"Johnson radius needs 0 <= delta <= 1, got {delta}")
    if variant == 'binary' and d > Fraction(1, 2):
        raise DomainError(f"Binary Johnson radius needs delta <= 1/2, got {delta}")
    if variant == 'q_ary':
        if q is None or q < 2:
            raise DomainError("q_ary Johnson radius needs an alphabet size q >= 2")
        if d > 1 - Fraction(1, q):
            raise DomainError(f"q_ary Johnson radius needs delta <= 1 - 1/q = {1 - Fraction(1, q)}, got {delta}")


def johnson_radius(delta: Number, variant: str = 'alphabet_free', q: Optional[int] = None):
    """
    Johnson radius for relative distance delta.

    alphabet_free: 1 - sqrt(1 - delta)
    binary:        (1 - sqrt(1 - 2 delta)) / 2
    q_ary:         (1 - 1/q)(1 - sqrt(1 - q delta / (q - 1)))

    Decimal input gives a Decimal result; anything else gives a float.
    """
    _check_johnson_domain(delta, variant, q)
    if isinstance(delta, Decimal):
        one, d = Decimal(1), delta
    else:
        one, d = 1.0, float(delta)

    if variant == 'alphabet_free':
        return one - _sqrt(one - d)
    if variant == 'binary':
        return (one - _sqrt(one - 2 * d)) / 2
    theta = one - one / q
    return theta * (one - _sqrt(one - d / theta))


def johnson_inverse(eta: Number, variant: str = 'alphabet_free', q: Optional[int] = None):
    """Relative distance whose Johnson radius is eta (polynomial, exact for rationals)"""
    if variant == 'alphabet_free':
        return 1 - (1 - eta) ** 2
    if variant == 'binary':
        return 2 * eta * (1 - eta)
    if variant == 'q_ary':
        theta = 1 - Fraction(1, q) if not isinstance(eta, (float, Decimal)) else 1 - type(eta)(1) / q
        return theta * (1 - (1 - eta / theta) ** 2)
    raise DomainError(f"Unknown Johnson variant '{variant}'")


def johnson_list_size(delta: Number, variant: str = 'binary', q: Optional[int] = None) -> Callable[[Number], float]:
    """l(radius) <= gamma^-2 with gamma = J(delta) - radius; 1 at non-positive radius"""
    j = johnson_radius(delta, variant, q)

    def ell(radius) -> float:
        if radius <= 0:
            return 1.0
        gamma = j - float(radius)
        return math.inf if gamma <= 0 else gamma ** -2
    return ell


def oracle_list_size(code: LinearCode, seed: int = 0) -> Callable[[Number], float]:
    """l(radius) measured by the max_list_size oracle at floor(radius n) errors, memoized per radius"""
    measured: Dict[int, float] = {}

    def ell(radius) -> float:
        errors = math.floor(radius * code.n)
        if errors not in measured:
            measured[errors] = float(max_list_size(code, errors, seed=seed).value)
        return measured[errors]
    return ell


def johnson_range_holds(delta: Number, variant: str = 'alphabet_free', q: Optional[int] = None) -> bool:
    """delta/2 < J(delta) <= delta"""
    j = lambda d: johnson_radius(d, variant, q)
    lower = strictly_less(lambda d: d / 2, j, delta)
    upper = not strictly_less(lambda d: d, j, delta)
    return lower and upper


def convexity_holds(delta1: Number, delta2: Number, variant: str = 'alphabet_free', q: Optional[int] = None) -> bool:
    """J(d1 d2) < min(d1 J(d2), d2 J(d1))"""
    j = lambda d: johnson_radius(d, variant, q)
    return strictly_less(lambda a, b: j(a * b), lambda a, b: min(a * j(b), b * j(a)), delta1, delta2)


def power_comparison_holds(delta: Number, m: int, variant: str = 'alphabet_free', q: Optional[int] = None) -> bool:
    """delta^(m-1) J(delta) > J(delta^m)"""
    j = lambda d: johnson_radius(d, variant, q)
    return strictly_less(lambda d: j(d ** m), lambda d: d ** (m - 1) * j(d), delta)


def ghw_chain_holds(delta: Number) -> Dict[str, bool]:
    """
    For delta <= 1/2 and r = ceil(log2(2/delta^2)) the GHW floor
    2 delta (1 - 2^-r) is at least 2 delta - delta^3, and its alphabet-free
    Johnson radius exceeds delta + delta^2/2.
    """
    d = as_rational(delta)
    r = ceil_log2(2 / d ** 2)
    floor = 2 * d * (1 - Fraction(1, 2 ** r))
    first = floor >= 2 * d - d ** 3
    second = strictly_less(lambda x, w: x + x ** 2 / 2,
                           lambda x, w: johnson_radius(w, 'alphabet_free'),
                           d, floor)
    return {'floor_at_least_2d_minus_d3': first, 'johnson_of_floor_exceeds_d_plus_half_d2': second, 'r': r}


def binary_inverse_chain_holds(delta: Number) -> bool:
    """J2^-1(delta + delta^2/2) < 2 delta - delta^2, exact"""
    d = as_rational(delta)
    return johnson_inverse(d + d ** 2 / 2, 'binary') < 2 * d - d ** 2


# Interleaved and tree bounds

@_bound('interleaved_bound')
def interleaved_bound(delta: Number, eta: Number, ell: int) -> BoundReport:
    """C(b+r, r) l^r with b = ceil(eta/(delta-eta)), r = ceil(log2(delta/(delta-eta)))"""
    d, e = as_rational(delta), as_rational(eta)
    if not 0 < d <= 1:
        raise DomainError(f"interleaved_bound needs 0 < delta <= 1, got {delta}")
    if e < 0:
        raise DomainError(f"interleaved_bound needs eta >= 0, got {eta}")
    if e >= d:
        raise DomainError(f"interleaved_bound needs eta < delta, got eta={eta}, delta={delta}")
    if ell < 1:
        raise DomainError(f"list size must be at least 1, got {ell}")

    b = _ceil(e / (d - e))
    r = ceil_log2(d / (d - e))
    value = math.comb(b + r, r) * ell ** r
    return BoundReport(
        name='interleaved_bound',
        params={'delta': delta, 'eta': eta, 'ell': ell},
        value=value,
        formula='C(b+r, r) * l^r, b = ceil(eta/(delta-eta)), r = ceil(log2(delta/(delta-eta)))',
        details={'b': b, 'r': r},
    )


@_bound('tree_leaf_bound')
def tree_leaf_bound(b: int, r: int, ell: int) -> BoundReport:
    """Solve t(b, r) = t(b-1, r) + l t(b, r-1), t(b, 0) = 1, and compare with C(b+r, r) l^r"""
    if b < 0 or r < 0:
        raise DomainError(f"tree_leaf_bound needs b, r >= 0, got b={b}, r={r}")
    t = [[0] * (r + 1) for _ in range(b + 1)]
    for i in range(b + 1):
        for j in range(r + 1):
            if j == 0:
                t[i][j] = 1
            elif i == 0:
                t[i][j] = ell * t[i][j - 1]
            else:
                t[i][j] = t[i - 1][j] + ell * t[i][j - 1]
    closed = math.comb(b + r, r) * ell ** r
    return BoundReport(
        name='tree_leaf_bound',
        params={'b': b, 'r': r, 'ell': ell},
        value=t[b][r],
        formula='t(b, r) = t(b-1, r) + l t(b, r-1), t(b, 0) = 1; closed form C(b+r, r) l^r',
        details={'closed_form': closed},
        holds=t[b][r] <= closed,
    )


# Generalized Hamming weights

def gaussian_binomial(k: int, r: int, q: int) -> int:
    """Number of r-dimensional subspaces of GF(q)^k"""
    if r < 0 or r > k:
        return 0
    num, den = 1, 1
    for i in range(r):
        num *= q ** (k - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref_bases(q: int, k: int, r: int):
    """Yield (pivots, stacked r x k bases) for every r-dim subspace, each exactly once"""
    for pivots in itertools.combinations(range(k), r):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, k) if j not in pivots]
        assignments = np.array(list(itertools.product(range(q), repeat=len(free))), dtype=np.int64)
        bases = np.zeros((len(assignments), r, k), dtype=np.int64)
        for i, p in enumerate(pivots):
            bases[:, i, p] = 1
        for slot, (i, j) in enumerate(free):
            bases[:, i, j] = assignments[:, slot]
        yield pivots, bases


def ghw(code: LinearCode, r: int) -> Fraction:
    """r-th generalized Hamming weight: min |Supp(V)|/n over r-dim subcodes V"""
    if r < 1 or r > code.k:
        raise DomainError(f"GHW order r must satisfy 1 <= r <= k = {code.k}, got {r}")
    if r in code._ghw:
        return code._ghw[r]

    count = gaussian_binomial(code.k, r, code.q)
    limit = config.cap('enumeration')
    if count > limit:
        raise EnumerationTooLarge(f"{code.tag}: {count} subspaces of dimension {r} exceed the enumeration cap {limit}")

    best = code.n
    for _, bases in rref_bases(code.q, code.k, r):
        stacked = code.field.matmul(bases.reshape(-1, code.k), code.generator)
        support = np.count_nonzero(np.any(stacked.reshape(len(bases), r, code.n) != 0, axis=1), axis=1)
        best = min(best, int(support.min()))
    value = Fraction(best, code.n)
    code._ghw[r] = value
    logger.debug(f"{code.tag}: delta_{r} = {value} over {count} subspaces")
    return value


def ghw_lower_bound(q: int, delta: Number, r: int) -> Fraction:
    """(q/(q-1)) delta (1 - q^-r)"""
    if r < 1:
        raise DomainError(f"GHW lower bound needs r >= 1, got {r}")
    return Fraction(q, q - 1) * as_rational(delta) * (1 - Fraction(1, q ** r))


def grid_rank(q: int, grid: MatrixWord) -> int:
    return field_new(q).rank(grid.to_array())


def interleaved_rank_weight(base: LinearCode, grid: MatrixWord) -> Dict[str, Any]:
    """Rank, row weight and GHW floor of an interleaved codeword grid"""
    rank = grid_rank(base.q, grid)
    weight = Fraction(int(np.count_nonzero(np.any(grid.to_array() != 0, axis=1))), grid.n_rows)
    floor = ghw(base, rank) if rank >= 1 else Fraction(0)
    return {'rank': rank, 'weight': weight, 'floor': floor, 'holds': weight >= floor}


def tensor_rank_weight(c2: LinearCode, c1: LinearCode, grid: MatrixWord) -> Dict[str, Any]:
    """Rank and cell weight of a tensor codeword against d1 times the GHW floor of C2 and d_{2,rank} d1"""
    rank = grid_rank(c1.q, grid)
    weight = Fraction(int(np.count_nonzero(grid.to_array())), grid.n_rows * grid.n_cols)
    d1, d2 = c1.relative_distance, c2.relative_distance
    # 2 d1 d2 (1 - 2^-rank) over GF(2)
    binary_floor = ghw_lower_bound(c2.q, d2, rank) * d1 if rank >= 1 else Fraction(0)
    ghw_floor = ghw(c2, rank) * d1 if rank >= 1 else Fraction(0)
    return {
        'rank': rank, 'weight': weight, 'floor': binary_floor, 'ghw_floor': ghw_floor,
        'holds': weight >= binary_floor and weight >= ghw_floor,
    }


# Deletion graph

@dataclass
class DeletionGraphReport:
    vertices: int
    edges: int
    max_degree: int
    greedy_independence: int
    alpha: Optional[int]              # exact independence number, None above the vertex cap
    alpha_exact: bool
    holds: Optional[bool]             # |V| <= alpha (d + 1); None without an exact alpha
    product_holds: Optional[bool]     # |V| <= alpha d, reported only
    symmetry_checked: int             # sampled pairs checked for predicate(c) == predicate(-c)
    symmetric: bool
    graph: Any = field(default=None, repr=False)


def _ball_arrays(code, received, radius: int) -> List[np.ndarray]:
    from .families import InterleavedCode, tuple_row_errors
    if isinstance(code, InterleavedCode):
        errors = tuple_row_errors(code, received)
        hits = np.flatnonzero(errors <= radius)
        book = code.base.codebook()
        n_codewords = len(book)
        grids = []
        for t in hits:
            indices = np.unravel_index(int(t), (n_codewords,) * code.m)
            grids.append(np.stack([book[i] for i in indices], axis=1).astype(np.int64))
        return grids
    return [w.to_array() for w in list_decode_brute(code, received, radius)]


def _wrap(q: int, values: np.ndarray):
    return MatrixWord.from_array(q, values) if values.ndim == 2 else Word.from_array(q, values)


def deletion_graph_analyze(code, received, radius: int, subcode_membership: Callable[[Any], bool],
                           seed: int = 0, symmetry_samples: int = 20) -> DeletionGraphReport:
    """
    Graph on the decoded list with an edge (i, j) when c_i - c_j is in the subcode.

    `code` is a LinearCode (received is a Word, radius in errors) or an
    InterleavedCode (received is a MatrixWord, radius in rows). The predicate
    gets the difference as a Word or MatrixWord.
    """
    from .families import InterleavedCode
    field_ = code.base.field if isinstance(code, InterleavedCode) else code.field
    q = field_.q
    members = _ball_arrays(code, received, radius)

    G = nx.Graph()
    G.add_nodes_from(range(len(members)))
    for i, j in itertools.combinations(range(len(members)), 2):
        if subcode_membership(_wrap(q, field_.sub_arrays(members[i], members[j]))):
            G.add_edge(i, j)

    rng = make_rng(seed)
    checked, symmetric = 0, True
    pairs = list(itertools.combinations(range(len(members)), 2))
    if pairs:
        picks = rng.choice(len(pairs), size=min(symmetry_samples, len(pairs)), replace=False)
        for p in picks:
            i, j = pairs[int(p)]
            diff = field_.sub_arrays(members[i], members[j])
            neg = field_.sub_arrays(np.zeros_like(diff), diff)
            symmetric &= subcode_membership(_wrap(q, diff)) == subcode_membership(_wrap(q, neg))
            checked += 1

    n_vertices = G.number_of_nodes()
    max_degree = max((deg for _, deg in G.degree()), default=0)
    greedy = len(nx.maximal_independent_set(G, seed=seed)) if n_vertices else 0

    alpha, exact = None, False
    if n_vertices <= config.cap('exact_independence_vertices'):
        alpha = nx.max_weight_clique(nx.complement(G), weight=None)[1] if n_vertices else 0
        exact = True
    else:
        logger.warning(f"Deletion graph has {n_vertices} vertices; reporting the greedy independent set only")

    holds = n_vertices <= alpha * (max_degree + 1) if exact else None
    product_holds = n_vertices <= alpha * max_degree if exact else None
    return DeletionGraphReport(
        vertices=n_vertices, edges=G.number_of_edges(), max_degree=max_degree,
        greedy_independence=greedy, alpha=alpha, alpha_exact=exact,
        holds=holds, product_holds=product_holds,
        symmetry_checked=checked, symmetric=bool(symmetric), graph=G,
    )


@_bound('deletion_lemma_bound')
def deletion_lemma_bound(mu: Number, eta: Number, ell_sub: int,
                         variant: str = 'alphabet_free', q: Optional[int] = None) -> BoundReport:
    """gamma^-2 * l(C', eta) with gamma = J(mu) - eta"""
    gamma = johnson_radius(mu, variant, q) - float(eta)
    if gamma <= 0:
        raise DomainError(f"Deletion bound needs eta < J(mu); J({mu}) = {gamma + float(eta):.6f}, eta = {eta}")
    return BoundReport(
        name='deletion_lemma_bound',
        params={'mu': mu, 'eta': eta, 'ell_sub': ell_sub, 'variant': variant, 'q': q},
        value=ell_sub / gamma ** 2,
        formula='gamma^-2 * l(C\', eta), gamma = J(mu) - eta',
        details={'gamma': gamma},
    )


# Tensor formulas (natural logs)

def concentration_tail(gamma: Number, m: int) -> float:
    """p(gamma, m) = 2 exp(-2 gamma^2 m)"""
    return 2 * math.exp(-2 * float(gamma) ** 2 * m)


@_bound('tensor_listsize_formula')
def tensor_listsize_formula(q: int, delta1: Number, ell1: Number, ell2: Number, eps: Number) -> BoundReport:
    """m1 = ln(8 l1/eps)/(2 d1^2), m2 = ln(8 l2/eps)/(2 eps^2), bound 4 q^(m1 m2)"""
    d1, l1, l2, e = float(delta1), float(ell1), float(ell2), float(eps)
    if min(d1, l1, l2, e) <= 0 or e >= 1:
        raise DomainError(f"tensor_listsize_formula needs positive parameters and eps < 1")
    m1 = math.log(8 * l1 / e) / (2 * d1 ** 2)
    m2 = math.log(8 * l2 / e) / (2 * e ** 2)
    log_value = math.log(4) + m1 * m2 * math.log(q)
    return BoundReport(
        name='tensor_listsize_formula',
        params={'q': q, 'delta1': delta1, 'ell1': ell1, 'ell2': ell2, 'eps': eps},
        value=_exp_or_inf(log_value),
        formula='4 q^(m1 m2), m1 = ln(8 l1/eps)/(2 delta1^2), m2 = ln(8 l2/eps)/(2 eps^2)',
        log_base='e',
        details={'m1': m1, 'm2': m2, 'm1_ceil': math.ceil(m1), 'm2_ceil': math.ceil(m2), 'ln_value': log_value},
    )


@_bound('repeated_tensor_bound')
def repeated_tensor_bound(q: int, delta: Number, ell: Number, eps: Number, m: int) -> BoundReport:
    """
    Iterate s_{j+1} = a s_j^2 from s_0 = ln(4 l/eps), a = ln q/(2 delta^2 eps^2),
    for log2(m) doublings. holds when s_{log2 m} is at most the closed-form
    exponent (9 ln q ln(12 l/(eps(1-delta^2))) / (2 delta^2 (1-delta^2)^2 eps^2))^m;
    the comparison with the unrolled (a s_0)^m is kept in details and holds iff a >= 1.
    """
    if m < 1 or m & (m - 1):
        raise MNotPowerOfTwo(f"m must be a power of two, got {m}")
    d, l, e = float(delta), float(ell), float(eps)
    if not 0 < d < 1 or l < 1 or not 0 < e < 1:
        raise DomainError("repeated_tensor_bound needs 0 < delta < 1, l >= 1 and 0 < eps < 1")

    doublings = m.bit_length() - 1
    a = math.log(q) / (2 * d ** 2 * e ** 2)
    s0 = math.log(4 * l / e)
    log_s = [math.log(s0)]
    for _ in range(doublings):
        log_s.append(math.log(a) + 2 * log_s[-1])
    log_iterated = log_s[-1]
    log_unrolled = m * (math.log(a) + math.log(s0))
    tol = config.tolerance('float_abs')

    base = 9 * math.log(q) * math.log(12 * l / (e * (1 - d ** 2))) / (2 * d ** 2 * (1 - d ** 2) ** 2 * e ** 2)
    log_exponent = m * math.log(base)

    s_final = _exp_or_inf(log_iterated)
    list_bound = math.inf if s_final == math.inf else _exp_or_inf(math.log(e / 4) + s_final)
    if doublings == 0:
        list_bound = l
    return BoundReport(
        name='repeated_tensor_bound',
        params={'q': q, 'delta': delta, 'ell': ell, 'eps': eps, 'm': m},
        value=list_bound,
        formula='s_{j+1} = a s_j^2, s_0 = ln(4l/eps), a = ln q/(2 delta^2 eps^2); exp((9 ln q ln(12l/(eps(1-delta^2)))/(2 delta^2 (1-delta^2)^2 eps^2))^m)',
        log_base='e',
        details={
            'a': a, 's0': s0, 'log_s': log_s, 'log_iterated': log_iterated,
            'log_unrolled': log_unrolled, 'log_closed_form_exponent': log_exponent,
            'unrolled_holds': log_iterated <= log_unrolled + tol,
        },
        holds=log_iterated <= log_exponent + tol,
    )


@_bound('tensor_rank_bound')
def tensor_rank_bound(delta1: Number, delta2: Number, ell1: Number, ell2: Number, eps: Number) -> BoundReport:
    """4/(d1^2 d2^2) * 2^(4r^2) eps^(-2r) l1^r l2^r, r = ceil(log2(2/(d1 d2)))"""
    d1, d2 = as_rational(delta1), as_rational(delta2)
    if not (0 < d1 <= 1 and 0 < d2 <= 1) or float(eps) <= 0:
        raise DomainError("tensor_rank_bound needs distances in (0, 1] and eps > 0")
    r = ceil_log2(2 / (d1 * d2))
    log_low_rank = (4 * r * r * math.log(2) - 2 * r * math.log(float(eps))
                    + r * math.log(float(ell1)) + r * math.log(float(ell2)))
    log_reduction = math.log(4 / float(d1 * d1 * d2 * d2))
    return BoundReport(
        name='tensor_rank_bound',
        params={'delta1': delta1, 'delta2': delta2, 'ell1': ell1, 'ell2': ell2, 'eps': eps},
        value=_exp_or_inf(log_low_rank + log_reduction),
        formula='4/(delta1^2 delta2^2) * 2^(4r^2) eps^(-2r) l1^r l2^r, r = ceil(log2(2/(delta1 delta2)))',
        details={'r': r, 'low_rank': _exp_or_inf(log_low_rank), 'reduction_factor': _exp_or_inf(log_reduction)},
    )


# Binary interleaved bounds

def _shifted_radii(delta: Fraction, eta: Fraction, r: int) -> List[Fraction]:
    return [eta - delta * (1 - Fraction(1, 2 ** k)) / 2 for k in range(r)]


@_bound('binary_interleaved_bounds')
def binary_interleaved_from_table(delta: Number, eta: Number, eps: Number,
                                  ell_table: Sequence[Tuple[Any, float]]) -> BoundReport:
    d, e = as_rational(delta), as_rational(eta)
    if not (0 < e < d <= Fraction(1, 2)):
        raise DomainError(f"binary interleaved bounds need 0 < eta < delta <= 1/2, got eta={eta}, delta={delta}")
    table = {as_rational(radius): float(value) for radius, value in ell_table}
    r = ceil_log2(2 / d ** 2)
    df, gap = float(d), float(d - e)
    # an empty ball (l = 0, negative radius) contributes a factor of 1
    ell = {radius: value if value > 0 else 1.0 for radius, value in table.items()}
    log_product = sum(math.log(ell[radius]) for radius in _shifted_radii(d, e, r))

    log_plain = math.log(4 / df ** 4) + r * math.log(2 * ell[e] / (df ** 2 * gap))
    log_shifted = 2 * r * r * math.log(2) - math.log(df ** 4) - r * math.log(gap) + log_product
    log_tree = math.log(r) + r * math.log(2) + log_product

    j2 = johnson_radius(d, 'binary')
    johnson_gap = df - j2
    c_delta = _exp_or_inf(math.log(4 / df ** 4) + r * r * math.log(2) - r * math.log(johnson_gap)) if johnson_gap > 0 else math.inf
    log_c_prime = math.log(r) + r * math.log(2) + sum(
        math.log(4 / (df ** 2 * (1 - 2.0 ** -k) ** 2)) for k in range(1, r))
    c_prime = _exp_or_inf(log_c_prime)

    forms = {
        'plain': _exp_or_inf(log_plain),
        'shifted_radius': _exp_or_inf(log_shifted),
        'tree': _exp_or_inf(log_tree),
    }
    return BoundReport(
        name='binary_interleaved_bounds',
        params={'delta': delta, 'eta': eta, 'eps': eps, 'ell_table': [tuple(p) for p in ell_table]},
        value=min(forms.values()),
        formula=('plain: (4/delta^4)(2 l(eta)/(delta^2 (delta-eta)))^r; '
                 'shifted_radius: 2^(2r^2)/(delta^4 (delta-eta)^r) prod_k l(eta - delta(1-2^-k)/2); '
                 'tree: r 2^r prod_k l(eta - delta(1-2^-k)/2); r = ceil(log2(2/delta^2)); '
                 'l = 0 counts as 1'),
        details={
            'r': r, **forms,
            'c_delta': c_delta,
            'c_prime_delta': c_prime,
            'johnson_chain_at_eps': c_prime * float(eps) ** -2,
        },
    )


def binary_interleaved_bounds(delta: Number, eta: Number, eps: Number,
                              ell_fn: Callable[[Fraction], float]) -> BoundReport:
    """
    The three binary interleaved list-size bounds side by side, with l supplied
    by ell_fn at eta and at the shifted radii eta - delta(1 - 2^-k)/2.
    """
    d, e = as_rational(delta), as_rational(eta)
    if not (0 < e < d <= Fraction(1, 2)):
        raise DomainError(f"binary interleaved bounds need 0 < eta < delta <= 1/2, got eta={eta}, delta={delta}")
    r = ceil_log2(2 / d ** 2)
    radii = sorted(set([e] + _shifted_radii(d, e, r)))
    table = [(radius, float(ell_fn(radius))) for radius in radii]
    return binary_interleaved_from_table(delta, eta, eps, table)


# Sampling concentration

@dataclass
class SerflingResult:
    empirical_tail: float
    bound: float
    standard_error: float
    holds: bool
    trials: int
    m: int
    n: int
    gamma: float


def serfling_check(z: Sequence[float], m: int, gamma: float, trials: int, seed: int = 0) -> SerflingResult:
    """
    Fraction of uniform m-subsets (without replacement) whose mean is at least
    gamma away from the population mean, against 2 exp(-2 gamma^2 m).
    """
    values = np.asarray(z, dtype=float)
    n = len(values)
    if m > n:
        raise MExceedsN(f"Sample size m={m} exceeds population size n={n}")
    if m < 1 or trials < 1:
        raise DomainError("serfling_check needs m >= 1 and trials >= 1")

    population_mean = float(values.mean())
    deviations = 0
    for t in range(trials):
        sample = trial_rng(seed, t).choice(n, size=m, replace=False)
        if abs(float(values[sample].mean()) - population_mean) >= gamma:
            deviations += 1

    empirical = deviations / trials
    bound = concentration_tail(gamma, m)
    p = min(bound, 1.0)
    se = math.sqrt(p * (1 - p) / trials)
    holds = empirical <= bound + config.tolerance('standard_errors') * se
    logger.debug(f"serfling m={m} gamma={gamma}: empirical {empirical:.5f} vs bound {bound:.5f}")
    return SerflingResult(empirical, bound, se, holds, trials, m, n, float(gamma))
