"""
Linear-transformation decoding tests. Every rank-structured decoder is
checked against the brute-force ball over all q^(km) transforms.
"""
from fractions import Fraction

import numpy as np
import pytest

from ldlab.datatypes import Word
from ldlab.errors import DomainError, LengthMismatch
from ldlab.lintrans import (
    LinTransform, ReceivedTable, canonical_directions, decode_full, decode_rank1, decode_rank1_q, decode_rank2,
    hadamard_decode_erasures, has_heavy_basis, heavy_basis_count, heavy_basis_limit, heavy_span_vectors, lin_ball,
    noisy_table, random_transform, rank_decompose, row_span, table_distance, weight_profile,
)


def matrices(transforms):
    return {L.matrix for L in transforms}


@pytest.fixture()
def full_rank():
    """3 x 2 transform over GF(2) of rank 2"""
    return LinTransform.from_array(2, [[1, 0], [0, 1], [1, 1]])


# -----------------------------
# Transforms and tables
# -----------------------------

class TestTransforms:
    """Tables, ranks and decompositions"""

    def test_table_rows(self, full_rank):
        table = full_rank.table()
        assert table.shape == (8, 2)
        # x = (0,0,1) picks the last row of M, x = (1,0,0) the first
        assert table[1].tolist() == [1, 1]
        assert table[4].tolist() == [1, 0]
        assert table[0].tolist() == [0, 0]

    def test_rank(self, full_rank):
        assert full_rank.rank == 2
        assert LinTransform.zero(2, 3, 2).rank == 0

    def test_rank_decompose(self, full_rank):
        r, U, V = rank_decompose(full_rank)
        assert r == 2
        assert (full_rank.field.matmul(U, V) == full_rank.to_array()).all()

    def test_row_span(self, full_rank):
        assert len(row_span(full_rank)) == 4
        assert row_span(LinTransform.zero(2, 3, 2)).tolist() == [[0, 0]]

    @pytest.mark.parametrize("rank", [0, 1, 2])
    def test_random_transform_rank(self, rank):
        assert random_transform(3, 3, 2, rank=rank, seed=rank).rank == rank

    def test_impossible_rank(self):
        with pytest.raises(DomainError):
            random_transform(2, 3, 2, rank=3)

    def test_not_a_matrix(self):
        with pytest.raises(LengthMismatch):
            LinTransform.from_array(2, [1, 0, 1])


class TestReceivedTables:
    """Noise, erasures and distances"""

    def test_clean_table(self, full_rank):
        R = ReceivedTable.from_transform(full_rank)
        assert table_distance(R, full_rank) == 0
        assert not R.erased.any()

    def test_noisy_rows(self, full_rank):
        R = noisy_table(full_rank, 2, seed=1)
        assert table_distance(R, full_rank) == Fraction(2, 8)

    def test_erased_rows_count(self, full_rank):
        R = noisy_table(full_rank, 1, seed=1, erased_rows=2)
        assert int(R.erased.sum()) == 2
        assert table_distance(R, full_rank) == Fraction(3, 8)

    def test_too_many_rows(self, full_rank):
        with pytest.raises(DomainError):
            noisy_table(full_rank, 6, erased_rows=3)

    def test_wrong_row_count(self):
        with pytest.raises(LengthMismatch):
            ReceivedTable.from_array(2, 3, np.zeros((7, 2), dtype=np.int64))

    def test_weight_profile(self, full_rank):
        R = ReceivedTable.from_transform(full_rank)
        # x^T M is uniform over the row span
        assert weight_profile(R, [0, 0]) == Fraction(1, 4)
        assert weight_profile(R, [1, 1]) == Fraction(1, 4)

    def test_weight_profile_counts_multiples(self):
        L = LinTransform.from_array(3, [[1, 2], [0, 0]])
        R = ReceivedTable.from_transform(L)
        # (1,2) and 2(1,2) = (2,1) together cover two thirds of x
        assert weight_profile(R, [1, 2]) == Fraction(2, 3)


# -----------------------------
# Hadamard decoding with erasures
# -----------------------------

class TestHadamardErasures:
    """Erasures always count as disagreements"""

    def test_clean_codeword(self, had23):
        result = hadamard_decode_erasures(had23.codeword(5), Fraction(1, 8))
        assert result.messages == [5]
        assert result.erasure_fraction == 0
        assert result.bound == pytest.approx(32.0)
        assert result.holds

    def test_all_erased(self):
        result = hadamard_decode_erasures(Word(2, (None,) * 8), Fraction(1, 8))
        assert result.messages == []
        assert result.bound is None and result.holds is None

    def test_half_erased_within_bound(self, had23):
        result = hadamard_decode_erasures(had23.codeword(3).erase([0, 1, 2]), Fraction(1, 16))
        assert 3 in result.messages
        assert result.holds

    def test_binary_only(self):
        with pytest.raises(DomainError):
            hadamard_decode_erasures(Word(3, (0, 1, 2)), Fraction(1, 8))

    def test_length_power_of_two(self):
        with pytest.raises(LengthMismatch):
            hadamard_decode_erasures(Word.zeros(2, 6), Fraction(1, 8))


# -----------------------------
# Rank-structured decoders against the ball
# -----------------------------

class TestRankDecoders:
    """Decoders agree with the rank-filtered brute-force ball"""

    @pytest.mark.parametrize("seed,errors,eps", [(0, 1, Fraction(1, 8)), (1, 2, Fraction(1, 16)), (2, 0, Fraction(1, 4))])
    def test_rank1(self, seed, errors, eps):
        L = random_transform(2, 3, 2, rank=1, seed=seed)
        R = noisy_table(L, errors, seed=seed)
        found = decode_rank1(R, eps)
        assert L.matrix in matrices(found)
        assert matrices(found) == matrices(lin_ball(R, Fraction(1, 2) - eps, max_rank=1))

    @pytest.mark.parametrize("seed,errors,erased", [(3, 1, 0), (4, 1, 1), (5, 0, 2)])
    def test_rank2(self, seed, errors, erased):
        L = random_transform(2, 3, 2, rank=2, seed=seed)
        R = noisy_table(L, errors, seed=seed, erased_rows=erased)
        eps = Fraction(1, 16)
        assert matrices(decode_rank2(R, eps)) == matrices(lin_ball(R, Fraction(1, 2) - eps, max_rank=2))

    def test_rank1_rejects_gfq(self):
        R = ReceivedTable.from_transform(LinTransform.zero(3, 2, 2))
        with pytest.raises(DomainError):
            decode_rank1(R, Fraction(1, 8))

    def test_full_decode(self):
        L = random_transform(2, 3, 3, seed=6)
        R = noisy_table(L, 1, seed=6, erased_rows=1)
        result = decode_full(R, Fraction(1, 8))
        assert L.matrix in matrices(result.transforms)
        assert matrices(result.transforms) == matrices(lin_ball(R, Fraction(3, 8)))
        assert result.rank2_matches
        assert result.observed_constant == pytest.approx(len(result.transforms) / 64)

    def test_rank1_over_gf3(self):
        L = random_transform(3, 2, 2, rank=1, seed=7)
        R = noisy_table(L, 1, seed=7)
        eps = Fraction(1, 9)
        found = decode_rank1_q(R, eps)
        assert L.matrix in matrices(found)
        assert matrices(found) == matrices(lin_ball(R, 1 - Fraction(1, 3) - eps, max_rank=1))

    def test_canonical_directions(self):
        assert canonical_directions(3, 2).tolist() == [[0, 1], [1, 0], [1, 1], [1, 2]]
        assert len(canonical_directions(2, 3)) == 7

    def test_ball_counts_erased_rows(self, full_rank):
        values = full_rank.table()
        values[2] = -1
        R = ReceivedTable.from_array(2, 3, values)
        assert lin_ball(R, 0) == []
        assert full_rank.matrix in matrices(lin_ball(R, Fraction(1, 8)))


class TestHeavyBases:
    """Heavy vectors and bases of row spans"""

    def test_heavy_vectors(self, full_rank):
        R = ReceivedTable.from_transform(full_rank)
        # each nonzero row value appears on a quarter of x
        assert heavy_span_vectors(R, Fraction(1, 4), 1) == [1, 2, 3]
        assert heavy_span_vectors(R, Fraction(1, 2), 0) == []

    def test_basis_count(self):
        assert heavy_basis_count([1, 2, 3], 2) == 6
        assert heavy_basis_count([1, 2], 1) == 2
        assert heavy_basis_count([1], 2) == 0

    def test_basis_limit(self):
        assert heavy_basis_limit(Fraction(1, 2), 2) == pytest.approx(64.0)

    def test_has_heavy_basis(self):
        L = LinTransform.from_array(2, [[1, 0], [0, 1], [0, 0]])
        assert has_heavy_basis(L, [1, 2])
        assert has_heavy_basis(L, [1, 3])
        assert not has_heavy_basis(L, [1])
