"""
Code family tests: Hadamard and Reed-Solomon parameters, tensor products,
interleaving and the block-linearity check.
"""
import numpy as np
import pytest

from ldlab.datatypes import MatrixWord, Word
from ldlab.errors import DegreeTooLarge, DuplicateEvalPoints, EnumerationTooLarge, FieldMismatch, LengthMismatch
from ldlab.families import (
    InterleavedCode, hadamard, interleave, interleaved_min_distance, is_block_linear, reed_solomon,
    tensor, tensor_codewords_by_membership, tuple_row_errors,
)
from ldlab.linear_code import encode, min_distance


class TestHadamard:
    """Had(q, k) has length q^k and distance q^k - q^(k-1)"""

    @pytest.mark.parametrize("q,k,d", [(2, 2, 2), (2, 3, 4), (3, 2, 6), (4, 1, 3), (5, 1, 4)])
    def test_distance(self, q, k, d):
        code = hadamard(q, k)
        assert code.n == q ** k
        assert min_distance(code) == d

    def test_tag(self, had23):
        assert had23.tag == 'hadamard(q=2,k=3)'

    def test_first_coordinate_is_zero_point(self, had32):
        assert np.all(had32.codebook()[:, 0] == 0)

    def test_encoding_is_inner_product(self, had23):
        # message (1,0,1) at point x = (1,1,0) (index 6) gives 1
        assert encode(had23, [1, 0, 1]).symbols[6] == 1
        assert encode(had23, [1, 0, 1]).symbols[5] == 0

    def test_k_zero(self):
        with pytest.raises(ValueError):
            hadamard(2, 0)

    def test_length_cap(self, small_cap):
        with pytest.raises(EnumerationTooLarge):
            hadamard(3, 4)


class TestReedSolomon:
    """Polynomial evaluation codes"""

    def test_encoding(self, rs5):
        # 3 + x at 0..4
        assert encode(rs5, [3, 1]).symbols == (3, 4, 0, 1, 2)

    def test_tag(self, rs5):
        assert rs5.tag == 'reed_solomon(q=5,n=5,degree_bound=1,k=2)'

    def test_duplicate_points(self):
        with pytest.raises(DuplicateEvalPoints):
            reed_solomon(5, [0, 1, 1], 1)

    @pytest.mark.parametrize("degree_bound", [-1, 3, 4])
    def test_degree_out_of_range(self, degree_bound):
        with pytest.raises(DegreeTooLarge):
            reed_solomon(5, [0, 1, 2], degree_bound)

    def test_extension_field(self):
        code = reed_solomon(4, range(4), 1)
        assert (code.n, code.k) == (4, 2)
        assert min_distance(code) == 3


class TestTensor:
    """Tensor products and membership"""

    def test_parameters(self, had22):
        t = tensor(had22, had22)
        assert (t.n, t.k) == (16, 4)
        assert min_distance(t) == 4
        assert t.factors == (had22, had22)

    def test_field_mismatch(self, had22, rs5):
        with pytest.raises(FieldMismatch):
            tensor(had22, rs5)

    def test_rows_and_columns_are_codewords(self, had22):
        c1 = reed_solomon(2, [0, 1], 0)
        t = tensor(had22, c1)
        for row in t.codebook():
            grid = row.reshape(had22.n, c1.n)
            rows_ok = {tuple(r) for r in c1.codebook().tolist()}
            cols_ok = {tuple(c) for c in had22.codebook().tolist()}
            assert all(tuple(r) in rows_ok for r in grid.tolist())
            assert all(tuple(c) in cols_ok for c in grid.T.tolist())

    def test_membership_matches_codebook(self, had22):
        t = tensor(had22, had22)
        by_generator = {tuple(int(v) for v in row) for row in t.codebook()}
        assert tensor_codewords_by_membership(had22, had22) == by_generator

    def test_tensor_of_hadamard_is_block_linear(self, had22):
        t = tensor(had22, had22)
        for i in range(t.size):
            assert is_block_linear(t.codeword(i), m=2, k=2)


class TestBlockLinear:
    """The block-linearity test on words of length q^(mk)"""

    def test_hadamard_codewords(self, had23):
        assert all(is_block_linear(had23.codeword(i), m=1, k=3) for i in range(had23.size))

    def test_single_one_is_not_linear(self):
        w = Word(2, tuple(1 if i == 5 else 0 for i in range(16)))
        assert not is_block_linear(w, m=2, k=2)

    def test_erasures_fail(self, had22):
        assert not is_block_linear(had22.codeword(1).erase([0]), m=1, k=2)

    def test_wrong_length(self):
        with pytest.raises(LengthMismatch):
            is_block_linear(Word.zeros(2, 6), m=1, k=2)


class TestInterleaved:
    """C^(m) grids and the row metric"""

    def test_multiplicity(self, had22):
        with pytest.raises(ValueError):
            InterleavedCode(had22, 0)

    def test_parameters(self, had22):
        ic = interleave(had22, 3)
        assert (ic.n, ic.k, ic.m, ic.size) == (4, 2, 3, 64)
        assert ic.distance == 2

    def test_min_distance_matches_base(self, had22):
        assert interleaved_min_distance(interleave(had22, 2)) == 2

    def test_encode_columns(self, had22):
        grid = interleave(had22, 2).encode([[0, 1], [1, 1]])
        assert grid.column(0) == had22.codeword(1)
        assert grid.column(1) == had22.codeword(3)

    def test_encode_wrong_count(self, had22):
        with pytest.raises(LengthMismatch):
            interleave(had22, 2).encode([[0, 1]])

    def test_tuple_index_order(self, had22):
        ic = interleave(had22, 2)
        errors = tuple_row_errors(ic, ic.grid([1, 2]))
        assert errors.shape == (16,)
        # column 1 is the most significant digit
        assert int(errors[1 * 4 + 2]) == 0
        assert int(np.count_nonzero(errors == 0)) == 1

    def test_erased_rows_are_free(self, had22):
        ic = interleave(had22, 2)
        values = ic.grid([3, 1]).to_array()
        values[0, :] = -1
        values[1, 0] = 1 - values[1, 0]
        errors = tuple_row_errors(ic, MatrixWord.from_array(2, values))
        assert int(errors[3 * 4 + 1]) == 1

    def test_shape_mismatch(self, had22):
        with pytest.raises(LengthMismatch):
            tuple_row_errors(interleave(had22, 2), MatrixWord.from_array(2, np.zeros((4, 3), dtype=np.int64)))
