"""
List decoding of interleaved codes.

Two decoders share the same brute-force base-code oracle:
- decode_naive: column-by-column extension with prefix filtering
  (candidate grids are kept only while their row distance stays in budget).
- erase_decode_tree: the full branching tree of the erase-and-decode
  procedure, where every disagreement found so far is erased before the next
  column is list decoded. Every branch is explored so the tree can be checked
  against its leaf bound and colour rules.

Radii are exact fractions of n; a row counts as one symbol.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .bounds import as_rational, interleaved_bound
from .datatypes import ERASED_CELL, MatrixWord, Word
from .errors import DomainError, LengthMismatch, RadiusTooLarge, TrivialCode
from .families import InterleavedCode, tuple_row_errors
from .linear_code import (
    LinearCode, ball_indices, max_list_size, min_distance, min_weight_codeword, puncture,
)

logger = logging.getLogger(__name__)

WHITE = 'WHITE'
BLUE = 'BLUE'
RED = 'RED'
COLORS = (WHITE, BLUE, RED)


def _check_grid(ic: InterleavedCode, R: MatrixWord) -> None:
    if R.q != ic.q:
        raise LengthMismatch(f"Received grid is over GF({R.q}), {ic.tag} is over GF({ic.q})")
    if R.shape != (ic.n, ic.m):
        raise LengthMismatch(f"Received grid has shape {R.shape}, {ic.tag} expects {(ic.n, ic.m)}")


def _radius_rows(ic: InterleavedCode, eta) -> int:
    eta = as_rational(eta)
    if eta < 0:
        raise DomainError(f"Radius must be non-negative, got {eta}")
    return math.floor(eta * ic.n)


def _erased_rows(R: MatrixWord) -> np.ndarray:
    return np.any(R.to_array() == ERASED_CELL, axis=1)


def _column_words(R: MatrixWord) -> List[Word]:
    """Columns of R with every row that has an erased cell erased in full"""
    erased = np.flatnonzero(_erased_rows(R)).tolist()
    return [column.erase(erased) for column in R.columns()]


def interleaved_ball_indices(ic: InterleavedCode, R: MatrixWord, eta) -> List[Tuple[int, ...]]:
    """Index tuples of every codeword grid within row distance eta of R, by exhaustive enumeration"""
    _check_grid(ic, R)
    radius = _radius_rows(ic, eta)
    errors = tuple_row_errors(ic, R)
    hits = np.flatnonzero(errors <= radius)
    order = np.lexsort((hits, errors[hits]))
    shape = (ic.base.size,) * ic.m
    return [tuple(int(i) for i in np.unravel_index(int(t), shape)) for t in hits[order]]


def interleaved_ball(ic: InterleavedCode, R: MatrixWord, eta) -> List[MatrixWord]:
    return [ic.grid(t) for t in interleaved_ball_indices(ic, R, eta)]


# Column-by-column decoding with prefix filtering

@dataclass
class NaiveDecodeStats:
    oracle_calls: int = 0
    oracle_comparisons: int = 0     # q^k * n symbol comparisons per base-code call
    extensions: int = 0             # (prefix, column candidate) pairs tried
    cell_comparisons: int = 0       # n per extension
    max_column_list: int = 0
    max_prefix_list: int = 0

    def ceiling(self, m: int, n: int, code_size: int) -> int:
        """m n q^k + m^2 n l L with l the largest column list and L the largest prefix list"""
        ell = max(1, self.max_column_list)
        prefixes = max(1, self.max_prefix_list)
        return m * n * code_size + m * m * n * ell * prefixes

    def within_ceiling(self, m: int, n: int, code_size: int) -> bool:
        return self.oracle_comparisons + self.cell_comparisons <= self.ceiling(m, n, code_size)


def decode_naive_indices(ic: InterleavedCode, R: MatrixWord, eta,
                         stats: Optional[NaiveDecodeStats] = None) -> List[Tuple[int, ...]]:
    _check_grid(ic, R)
    radius = _radius_rows(ic, eta)
    stats = stats if stats is not None else NaiveDecodeStats()
    book = ic.base.codebook()
    values = R.to_array()
    live = ~_erased_rows(R)

    columns = _column_words(R)
    prefixes: List[Tuple[Tuple[int, ...], np.ndarray]] = [((), np.zeros(ic.n, dtype=bool))]
    for i, column in enumerate(columns):
        candidates = ball_indices(ic.base, column, radius)
        stats.oracle_calls += 1
        stats.oracle_comparisons += ic.base.size * ic.n
        stats.max_column_list = max(stats.max_column_list, len(candidates))

        mismatch = (book[candidates] != values[:, i]) & live
        extended = []
        for label, differs in prefixes:
            for t, column_mismatch in zip(candidates, mismatch):
                stats.extensions += 1
                stats.cell_comparisons += ic.n
                rows = differs | column_mismatch
                if np.count_nonzero(rows) <= radius:
                    extended.append((label + (int(t),), rows))
        prefixes = extended
        stats.max_prefix_list = max(stats.max_prefix_list, len(prefixes))
        logger.debug(f"{ic.tag}: column {i + 1} list {len(candidates)}, {len(prefixes)} prefixes survive")

    prefixes.sort(key=lambda item: (int(np.count_nonzero(item[1])), item[0]))
    return [label for label, _ in prefixes]


def decode_naive(ic: InterleavedCode, R: MatrixWord, eta,
                 stats: Optional[NaiveDecodeStats] = None) -> List[MatrixWord]:
    """Every codeword grid within row distance eta of R, sorted by (row errors, column indices)"""
    return [ic.grid(t) for t in decode_naive_indices(ic, R, eta, stats)]


# The erase-and-decode execution tree

@dataclass
class TreeEdge:
    codeword: int            # base-code message index chosen for this column
    weight: Fraction         # new disagreements on unerased positions, over n
    color: str
    child: 'TreeNode'


@dataclass
class TreeNode:
    level: int
    erased: FrozenSet[int]           # S(v)
    label: Tuple[int, ...]           # base-code indices of the columns decoded so far
    mu: Fraction                     # |S(v)| / n
    delta_v: Optional[Fraction] = None
    radius_errors: Optional[int] = None
    edges: List[TreeEdge] = field(default_factory=list)


@dataclass
class DecodeTree:
    code: InterleavedCode
    received: MatrixWord
    eta: Fraction
    delta: Fraction
    exact_delta_v: bool              # exact punctured distances rather than delta - mu
    root: TreeNode

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(edge.child for edge in reversed(node.edges))

    def leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes() if node.level == self.code.m]

    def leaf_labels(self) -> List[Tuple[int, ...]]:
        return [node.label for node in self.leaves()]


def _disagreements(ic: InterleavedCode, R: MatrixWord, label: Sequence[int]) -> FrozenSet[int]:
    """Rows where the partial grid with the given columns differs from R on unerased rows"""
    book = ic.base.codebook()
    values = R.to_array()
    live = ~_erased_rows(R)
    differs = np.zeros(ic.n, dtype=bool)
    for i, t in enumerate(label):
        differs |= (book[t] != values[:, i]) & live
    return frozenset(np.flatnonzero(differs).tolist())


def erase_decode_tree(ic: InterleavedCode, R: MatrixWord, eta) -> DecodeTree:
    """
    Expand every branch of erase-and-decode.

    At a node with erasure set S the next column is list decoded on the code
    punctured at S, with (floor(eta n) - |S|) errors allowed. Each returned
    codeword becomes an edge whose weight is its disagreement with R off S;
    the child erases those disagreements too.
    """
    _check_grid(ic, R)
    eta = as_rational(eta)
    delta = ic.base.relative_distance
    if eta >= delta:
        raise RadiusTooLarge(f"Erase-decode needs eta < delta; got eta={eta}, delta={delta}")
    budget = _radius_rows(ic, eta)
    n = ic.n

    exact = ic.base.size <= config.cap('exact_puncture_distance')
    if not exact:
        logger.warning(f"{ic.tag}: {ic.base.size} codewords, colouring with the lower bound delta - mu")

    book = ic.base.codebook()
    values = R.to_array()
    columns = _column_words(R)
    punctured: Dict[FrozenSet[int], Any] = {}

    def punctured_code(S: FrozenSet[int]) -> LinearCode:
        if S not in punctured:
            punctured[S] = puncture(ic.base, S)
        return punctured[S]

    def expand(node: TreeNode) -> None:
        if node.level == ic.m:
            return
        S = node.erased
        code_S = punctured_code(S)
        node.radius_errors = budget - len(S)
        node.delta_v = Fraction(min_distance(code_S), n) if exact else delta - node.mu

        kept = np.array(code_S.kept, dtype=np.int64)
        column = columns[node.level]
        restricted = column.restrict(kept.tolist())
        live = restricted.to_array() != ERASED_CELL
        # punctured message order equals the base order, so indices address `book`
        for t in ball_indices(code_S, restricted, node.radius_errors):
            differs = (book[t, kept] != values[kept, node.level]) & live
            new_rows = kept[differs]
            weight = Fraction(len(new_rows), n)
            if weight < delta - eta:
                color = WHITE
            elif weight < node.delta_v / 2:
                color = BLUE
            else:
                color = RED
            child = TreeNode(
                level=node.level + 1,
                erased=S | frozenset(new_rows.tolist()),
                label=node.label + (int(t),),
                mu=node.mu + weight,
            )
            node.edges.append(TreeEdge(int(t), weight, color, child))
            expand(child)

    root = TreeNode(level=0, erased=frozenset(), label=(), mu=Fraction(0))
    expand(root)
    tree = DecodeTree(ic, R, eta, delta, exact, root)
    logger.info(f"{ic.tag}: erase-decode tree at eta={eta} has {len(tree.leaves())} leaves")
    return tree


@dataclass
class TreeStats:
    leaves_at_level_m: int
    dead_leaves: int
    nodes: int
    b: int
    r: int
    max_blue_per_node: int
    max_blue_per_path: int
    max_red_per_path: int
    per_path_color_counts: List[Dict[str, int]]
    white_exclusivity_violations: List[Tuple[int, ...]]
    blue_out_degree_violations: List[Tuple[int, ...]]
    blue_path_violations: List[Tuple[int, ...]]
    red_path_violations: List[Tuple[int, ...]]
    nesting_violations: List[Tuple[int, ...]]

    @property
    def violations(self) -> int:
        return (len(self.white_exclusivity_violations) + len(self.blue_out_degree_violations)
                + len(self.blue_path_violations) + len(self.red_path_violations)
                + len(self.nesting_violations))


def tree_stats(tree: DecodeTree) -> TreeStats:
    """Exact traversal counts plus every node or path breaking the colour lemmas"""
    ic = tree.code
    details = interleaved_bound(tree.delta, tree.eta, 1).details
    b, r = details['b'], details['r']

    white_bad, blue_degree_bad, blue_path_bad, red_path_bad, nesting_bad = [], [], [], [], []
    paths: List[Dict[str, int]] = []
    dead = nodes = max_blue_node = 0

    stack = [(tree.root, {c: 0 for c in COLORS})]
    while stack:
        node, counts = stack.pop()
        nodes += 1
        colors = [edge.color for edge in node.edges]
        if WHITE in colors and len(colors) > 1:
            white_bad.append(node.label)
        blues = colors.count(BLUE)
        max_blue_node = max(max_blue_node, blues)
        if blues > 1:
            blue_degree_bad.append(node.label)

        if node.level == ic.m:
            paths.append(counts)
            if counts[BLUE] > b:
                blue_path_bad.append(node.label)
            if counts[RED] > r:
                red_path_bad.append(node.label)
        elif not node.edges:
            dead += 1

        for edge in reversed(node.edges):
            child = edge.child
            expected = _disagreements(ic, tree.received, child.label)
            if child.erased != expected or child.mu != node.mu + edge.weight or not node.erased <= child.erased:
                nesting_bad.append(child.label)
            stack.append((child, {**counts, edge.color: counts[edge.color] + 1}))

    return TreeStats(
        leaves_at_level_m=len(paths),
        dead_leaves=dead,
        nodes=nodes,
        b=b, r=r,
        max_blue_per_node=max_blue_node,
        max_blue_per_path=max((p[BLUE] for p in paths), default=0),
        max_red_per_path=max((p[RED] for p in paths), default=0),
        per_path_color_counts=paths,
        white_exclusivity_violations=white_bad,
        blue_out_degree_violations=blue_degree_bad,
        blue_path_violations=blue_path_bad,
        red_path_violations=red_path_bad,
        nesting_violations=nesting_bad,
    )


def tree_to_json(tree: DecodeTree) -> Dict[str, Any]:
    """Nested dump: node mu and erasures, edge weight and colour"""
    def dump(node: TreeNode) -> Dict[str, Any]:
        return {
            'level': node.level,
            'label': list(node.label),
            'mu': node.mu,
            'erased': sorted(node.erased),
            'delta_v': node.delta_v,
            'edges': [
                {'codeword': e.codeword, 'weight': e.weight, 'color': e.color, 'child': dump(e.child)}
                for e in node.edges
            ],
        }
    return {
        'code': tree.code.tag,
        'eta': tree.eta,
        'delta': tree.delta,
        'exact_delta_v': tree.exact_delta_v,
        'root': dump(tree.root),
    }


# Lower-bound witness and puncturing check

def interleave_lower_witness(c: LinearCode, m: int) -> Tuple[MatrixWord, List[MatrixWord]]:
    """
    R = (c1, ..., c1) with c1 a minimum-weight codeword, and the 2^m grids whose
    column i is c1 for i in T and 0 otherwise. Each differs from R only on
    Supp(c1), so all lie within relative row distance delta.
    """
    if c.size < 2:
        raise TrivialCode(f"{c.tag} has a single codeword")
    if m < 1:
        raise DomainError(f"Interleaving multiplicity must be at least 1, got m={m}")
    c1 = min_weight_codeword(c).to_array()
    c2 = np.zeros_like(c1)
    R = MatrixWord.from_array(c.q, np.stack([c1] * m, axis=1))
    grids = [
        MatrixWord.from_array(c.q, np.stack([c1 if bit else c2 for bit in mask], axis=1))
        for mask in itertools.product((0, 1), repeat=m)
    ]
    return R, grids


@dataclass
class PuncturedListCheck:
    erased: Tuple[int, ...]
    radius_errors: int
    punctured_list: int          # l^{-S}(t)
    shifted_list: int            # l(t + |S|)
    exhaustive: bool
    holds: bool


def punctured_list_check(code: LinearCode, S: Sequence[int], radius_errors: int, seed: int = 0) -> PuncturedListCheck:
    """Compare the punctured code's list size at t with the full code's at t + |S|"""
    punctured = puncture(code, S)
    erased = tuple(sorted(set(int(i) for i in S)))
    lhs = max_list_size(punctured, radius_errors, seed=seed)
    rhs = max_list_size(code, radius_errors + len(erased), seed=seed)
    return PuncturedListCheck(
        erased=erased,
        radius_errors=radius_errors,
        punctured_list=lhs.value,
        shifted_list=rhs.value,
        exhaustive=lhs.exhaustive and rhs.exhaustive,
        holds=lhs.value <= rhs.value,
    )
