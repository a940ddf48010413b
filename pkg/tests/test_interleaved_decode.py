"""
Interleaved decoding tests: the naive column decoder and the erase-decode
tree both against the exhaustive ball, plus the tree colour rules.
"""
from fractions import Fraction

import numpy as np
import pytest

from ldlab.datatypes import MatrixWord
from ldlab.errors import DomainError, LengthMismatch, RadiusTooLarge
from ldlab.families import interleave
from ldlab.interleaved_decode import (
    BLUE, RED, WHITE, NaiveDecodeStats, decode_naive, decode_naive_indices, erase_decode_tree,
    interleave_lower_witness, interleaved_ball, interleaved_ball_indices, punctured_list_check,
    tree_stats, tree_to_json,
)
from ldlab.linear_code import trial_rng


def noisy_grid(ic, labels, bad_rows, seed=0):
    """Codeword grid with every cell of the given rows replaced by a random symbol"""
    values = ic.grid(labels).to_array()
    rng = trial_rng(seed, 0)
    for row in bad_rows:
        values[row, :] = rng.integers(0, ic.q, size=ic.m)
    return MatrixWord.from_array(ic.q, values)


# -----------------------------
# Exhaustive ball
# -----------------------------

class TestBall:
    """Exhaustive enumeration of codeword grids"""

    def test_exact_grid(self, had23):
        ic = interleave(had23, 2)
        assert interleaved_ball_indices(ic, ic.grid([5, 3]), 0) == [(5, 3)]

    def test_sorted_by_row_errors(self, had22):
        ic = interleave(had22, 2)
        R = noisy_grid(ic, [1, 2], [0], seed=3)
        grids = interleaved_ball(ic, R, Fraction(3, 4))
        errors = [sum(1 for a, b in zip(g.rows, R.rows) if a != b) for g in grids]
        assert errors == sorted(errors)

    def test_negative_radius(self, had22):
        ic = interleave(had22, 2)
        with pytest.raises(DomainError):
            interleaved_ball_indices(ic, ic.grid([0, 0]), Fraction(-1, 4))

    def test_wrong_shape(self, had22):
        with pytest.raises(LengthMismatch):
            interleaved_ball_indices(interleave(had22, 3), interleave(had22, 2).grid([0, 0]), 0)


# -----------------------------
# Naive column decoder
# -----------------------------

class TestNaiveDecoder:
    """Column-by-column extension equals the exhaustive ball"""

    @pytest.mark.parametrize("labels,bad_rows,eta", [
        ([5, 3], [], Fraction(0)),
        ([5, 3], [2], Fraction(1, 8)),
        ([1, 6], [0, 7], Fraction(1, 4)),
        ([7, 7], [1, 4], Fraction(3, 8)),
        ([2, 0], [3, 5, 6], Fraction(1, 2)),
    ])
    def test_matches_ball(self, had23, labels, bad_rows, eta):
        ic = interleave(had23, 2)
        R = noisy_grid(ic, labels, bad_rows, seed=len(bad_rows))
        assert decode_naive_indices(ic, R, eta) == interleaved_ball_indices(ic, R, eta)

    def test_three_columns_over_gf3(self, had32):
        ic = interleave(had32, 3)
        R = noisy_grid(ic, [4, 0, 8], [1, 5], seed=2)
        assert decode_naive_indices(ic, R, Fraction(2, 9)) == interleaved_ball_indices(ic, R, Fraction(2, 9))

    def test_erased_rows_are_skipped(self, had23):
        ic = interleave(had23, 2)
        values = ic.grid([6, 1]).to_array()
        values[0, 1] = -1
        values[3, :] = 1 - values[3, :]
        R = MatrixWord.from_array(2, values)
        found = decode_naive_indices(ic, R, Fraction(1, 8))
        assert (6, 1) in found
        assert found == interleaved_ball_indices(ic, R, Fraction(1, 8))

    def test_stats(self, had23):
        ic = interleave(had23, 2)
        stats = NaiveDecodeStats()
        grids = decode_naive(ic, noisy_grid(ic, [3, 4], [2], seed=1), Fraction(1, 4), stats)
        assert stats.oracle_calls == 2
        assert stats.oracle_comparisons == 2 * 8 * 8
        assert stats.max_prefix_list >= len(grids) >= 1
        assert stats.within_ceiling(ic.m, ic.n, had23.size)

    def test_ceiling_formula(self):
        stats = NaiveDecodeStats(max_column_list=3, max_prefix_list=2)
        # m n q^k + m^2 n l L
        assert stats.ceiling(2, 8, 8) == 2 * 8 * 8 + 4 * 8 * 3 * 2


# -----------------------------
# Erase-decode tree
# -----------------------------

class TestEraseDecodeTree:
    """Leaves, colours and nesting of the full branching tree"""

    @pytest.mark.parametrize("labels,bad_rows,eta", [
        ([5, 3], [2], Fraction(1, 8)),
        ([1, 6], [0, 7], Fraction(1, 4)),
        ([7, 2], [1, 4, 6], Fraction(3, 8)),
    ])
    def test_leaves_are_the_ball(self, had23, labels, bad_rows, eta):
        ic = interleave(had23, 2)
        R = noisy_grid(ic, labels, bad_rows, seed=5)
        tree = erase_decode_tree(ic, R, eta)
        assert sorted(tree.leaf_labels()) == sorted(interleaved_ball_indices(ic, R, eta))

    @pytest.mark.parametrize("eta", [Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)])
    def test_colour_rules_hold(self, had23, eta):
        ic = interleave(had23, 3)
        R = noisy_grid(ic, [2, 5, 7], [0, 3], seed=7)
        stats = tree_stats(erase_decode_tree(ic, R, eta))
        assert stats.violations == 0
        assert stats.max_blue_per_node <= 1
        assert stats.max_blue_per_path <= stats.b
        assert stats.max_red_per_path <= stats.r

    def test_noiseless_tree_is_a_white_path(self, had23):
        ic = interleave(had23, 3)
        tree = erase_decode_tree(ic, ic.grid([1, 2, 3]), Fraction(1, 4))
        stats = tree_stats(tree)
        assert tree.leaf_labels() == [(1, 2, 3)]
        assert stats.nodes == 4
        assert all(counts[WHITE] == 3 for counts in stats.per_path_color_counts)

    def test_radius_at_distance(self, had23):
        ic = interleave(had23, 2)
        with pytest.raises(RadiusTooLarge):
            erase_decode_tree(ic, ic.grid([0, 0]), Fraction(1, 2))

    def test_erasures_grow_along_paths(self, had23):
        ic = interleave(had23, 2)
        tree = erase_decode_tree(ic, noisy_grid(ic, [4, 4], [1, 2], seed=9), Fraction(1, 4))
        for node in tree.nodes():
            for edge in node.edges:
                assert node.erased <= edge.child.erased
                assert edge.child.mu == node.mu + edge.weight
                assert edge.color in (WHITE, BLUE, RED)

    def test_json_dump(self, had23):
        ic = interleave(had23, 2)
        dumped = tree_to_json(erase_decode_tree(ic, ic.grid([3, 3]), Fraction(1, 8)))
        assert dumped['code'] == ic.tag
        assert dumped['root']['level'] == 0
        assert dumped['root']['edges'][0]['color'] == WHITE


class TestWitnessAndPuncturing:
    """The 2^m lower-bound grids and the punctured list check"""

    def test_witness_grids_in_ball(self, had22):
        R, grids = interleave_lower_witness(had22, 3)
        assert len(grids) == 8
        ic = interleave(had22, 3)
        ball = interleaved_ball(ic, R, Fraction(1, 2))
        assert all(g in ball for g in grids)

    def test_witness_needs_m(self, had22):
        with pytest.raises(DomainError):
            interleave_lower_witness(had22, 0)

    @pytest.mark.parametrize("S,t", [([0], 1), ([1, 6], 0), ([2, 3, 5], 1)])
    def test_punctured_list_at_most_shifted(self, had23, S, t):
        check = punctured_list_check(had23, S, t)
        assert check.exhaustive
        assert check.holds
        assert check.punctured_list <= check.shifted_list
