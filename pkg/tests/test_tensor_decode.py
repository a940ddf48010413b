"""
Tensor decoding tests: sample sizes, planted and enumerated advice, the
per-phase diagnostics and the lower-bound witness.
"""
import math
from fractions import Fraction

import pytest

from ldlab.bounds import concentration_tail
from ldlab.datatypes import MatrixWord
from ldlab.errors import AdviceSpaceTooLarge, DomainError, LengthMismatch
from ldlab.families import tensor
from ldlab.tensor_decode import (
    is_tensor_codeword, phase_diagnostics, sample_sizes, success_floor, tensor_decode, tensor_lower_witness,
)

ETA = Fraction(3, 8)
EPS = Fraction(1, 32)


@pytest.fixture()
def planted(had23):
    """A codeword of Had(2,3) (x) Had(2,3) as an 8 x 8 grid"""
    return MatrixWord.from_flat(tensor(had23, had23).codeword(37), 8, 8)


@pytest.fixture()
def received(planted):
    """The planted grid with three flipped cells in distinct rows and columns"""
    values = planted.to_array()
    for row, col in [(0, 1), (2, 5), (6, 6)]:
        values[row, col] = 1 - values[row, col]
    return MatrixWord.from_array(2, values)


class TestSampleSizes:
    """Sample sizes and the success floor"""

    def test_formulas(self):
        sizes = sample_sizes(Fraction(1, 2), 1, 1, Fraction(1, 4), 100, 100)
        assert sizes.formula_m1 == pytest.approx(math.log(32) / 0.5)
        assert (sizes.m1, sizes.m2) == (7, 28)
        assert not sizes.capped

    def test_capped_at_length(self):
        sizes = sample_sizes(Fraction(1, 2), 2, 2, EPS, 8, 8)
        assert (sizes.m1, sizes.m2) == (8, 8)
        assert sizes.t_full and sizes.s_full

    def test_success_floor(self):
        sizes = sample_sizes(Fraction(1, 2), 1, 1, Fraction(1, 4), 100, 100)
        p_s = concentration_tail(0.25, 28)
        p_t = concentration_tail(0.5, 7)
        assert success_floor(sizes, Fraction(1, 2), 1, 1, Fraction(1, 4)) == pytest.approx(1 - p_s - 4 * p_t - 4 * p_s)

    def test_full_sets_always_succeed(self):
        sizes = sample_sizes(Fraction(1, 2), 2, 2, EPS, 8, 8)
        assert success_floor(sizes, Fraction(1, 2), 2, 2, EPS) == 1.0


class TestPlantedDecode:
    """The planted advice string recovers the planted codeword"""

    def test_recovers_planted(self, had23, planted, received):
        result = tensor_decode(had23, had23, received, ETA, ETA, EPS, seed=1, planted=planted)
        assert result.eta_star == Fraction(3, 16)
        assert result.target == Fraction(3, 32)
        assert result.target_errors == 6
        assert result.codewords == [planted]
        assert result.advice_tried == 1

    def test_phase_diagnostics(self, had23, planted, received):
        result = tensor_decode(had23, had23, received, ETA, ETA, EPS, seed=1, planted=planted)
        diagnostics = phase_diagnostics(result.states[0], planted, received,
                                        Fraction(1, 2), Fraction(1, 2), ETA, EPS)
        assert diagnostics.recovered
        assert diagnostics.claims_hold
        assert diagnostics.implication_holds
        assert diagnostics.S_w == () and diagnostics.T_w == ()
        assert len(diagnostics.U_1) == 8

    def test_state_sets(self, had23, planted, received):
        state = tensor_decode(had23, had23, received, ETA, ETA, EPS, planted=planted).states[0]
        assert state.s_success == tuple(range(8))
        assert state.t_fail == ()
        assert state.u_success == tuple(range(8))

    def test_needs_planted_grid(self, had23, received):
        with pytest.raises(DomainError):
            tensor_decode(had23, had23, received, ETA, ETA, EPS)

    def test_negative_target(self, had23, planted, received):
        with pytest.raises(DomainError):
            tensor_decode(had23, had23, received, ETA, ETA, Fraction(1, 8), planted=planted)

    def test_unknown_mode(self, had23, planted, received):
        with pytest.raises(DomainError):
            tensor_decode(had23, had23, received, ETA, ETA, EPS, advice_mode='oracle', planted=planted)

    def test_shape_mismatch(self, had22, had23, planted):
        with pytest.raises(LengthMismatch):
            tensor_decode(had22, had23, planted, ETA, ETA, EPS, planted=planted)


class TestEnumeratedAdvice:
    """All q^(|S||T|) advice strings"""

    def test_finds_planted(self, had23, planted, received):
        result = tensor_decode(had23, had23, received, ETA, ETA, EPS, seed=3,
                               advice_mode='enumerate', m1=2, m2=2, ell1=4, ell2=4)
        assert result.advice_tried == 16
        assert planted in result.codewords
        assert result.states == []

    def test_outputs_within_target(self, had23, received):
        result = tensor_decode(had23, had23, received, ETA, ETA, EPS, seed=3,
                               advice_mode='enumerate', m1=2, m2=2, ell1=4, ell2=4)
        for grid in result.codewords:
            errors = sum(1 for a, b in zip(grid.flatten().symbols, received.flatten().symbols) if a != b)
            assert errors <= result.target_errors
            assert is_tensor_codeword(had23, had23, grid)

    def test_advice_cap(self, had23, received, small_cap):
        # 2^9 advice strings against a cap of 64
        with pytest.raises(AdviceSpaceTooLarge):
            tensor_decode(had23, had23, received, ETA, ETA, EPS,
                          advice_mode='enumerate', m1=3, m2=3, ell1=1, ell2=1)


class TestWitness:
    """Tensor codeword checks and the lower-bound construction"""

    def test_planted_is_tensor_codeword(self, had23, planted, received):
        assert is_tensor_codeword(had23, had23, planted)
        assert not is_tensor_codeword(had23, had23, received)

    def test_witness_grids(self, had22):
        received = had22.codeword(3)
        R, grids = tensor_lower_witness(had22, received, [had22.codeword(i) for i in range(4)])
        assert R.shape == (4, 4)
        assert len(grids) == 4
        assert all(is_tensor_codeword(had22, had22, g) for g in grids)

    def test_witness_rejects_erasures(self, had22):
        with pytest.raises(DomainError):
            tensor_lower_witness(had22, had22.codeword(1).erase([0]), [])
