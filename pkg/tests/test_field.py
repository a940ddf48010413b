"""
Finite-field tests: construction, fixed encodings of the extension fields,
and the field axioms checked with hypothesis on small orders.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldlab.errors import DivisionByZero, NotPrimePower, OrderTooLarge
from ldlab.field import field_new, first_irreducible

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16]


class TestConstruction:
    """Prime-power checks, caps and the cached constructor"""

    @pytest.mark.parametrize("q", [0, 1, 6, 10, 12])
    def test_not_prime_power(self, q):
        with pytest.raises(NotPrimePower):
            field_new(q)

    def test_order_above_cap(self):
        # 2^13 is a prime power but above caps.field_order (4096)
        with pytest.raises(OrderTooLarge):
            field_new(8192)

    def test_cached(self):
        assert field_new(4) is field_new(4)

    @pytest.mark.parametrize("q,p,e", [(2, 2, 1), (9, 3, 2), (16, 2, 4), (25, 5, 2)])
    def test_characteristic_and_degree(self, q, p, e):
        F = field_new(q)
        assert (F.p, F.e) == (p, e)


class TestFixedEncodings:
    """Element encodings do not depend on the galois default polynomial"""

    def test_gf4_reduction_polynomial(self):
        assert field_new(4).reduction_poly == (1, 1, 1)

    def test_gf9_uses_first_irreducible(self):
        # x^2 + 1 is the first monic irreducible quadratic over GF(3)
        assert field_new(9).reduction_poly == (1, 0, 1)
        assert tuple(int(c) for c in first_irreducible(3, 2).coeffs) == (1, 0, 1)

    def test_gf4_products(self):
        F = field_new(4)
        # 2 = x, 3 = x + 1, x^2 = x + 1
        assert F.mul(2, 2) == 3
        assert F.mul(2, 3) == 1
        assert F.add(2, 3) == 1

    def test_gf9_square_of_x(self):
        F = field_new(9)
        # x is encoded as 3; x^2 = -1 = 2
        assert F.mul(3, 3) == 2

    def test_reduction_poly_str(self):
        assert field_new(4).reduction_poly_str == 'x^2 + x + 1'


class TestScalarErrors:
    """Division by zero and bad encodings"""

    def test_inverse_of_zero(self):
        with pytest.raises(DivisionByZero):
            field_new(5).inv(0)

    def test_division_by_zero_is_zero_division_error(self):
        with pytest.raises(ZeroDivisionError):
            field_new(4).div(1, 0)

    def test_negative_power_of_zero(self):
        with pytest.raises(DivisionByZero):
            field_new(3).pow(0, -1)

    def test_out_of_range_element(self):
        with pytest.raises(ValueError):
            field_new(3).add(3, 0)


class TestAxioms:
    """Field axioms on random elements of small fields"""

    @settings(max_examples=200)
    @given(st.sampled_from(ORDERS), st.data())
    def test_ring_axioms(self, q, data):
        F = field_new(q)
        a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.sub(F.add(a, b), b) == a
        assert F.add(a, F.neg(a)) == 0

    @settings(max_examples=200)
    @given(st.sampled_from(ORDERS), st.data())
    def test_inverses(self, q, data):
        F = field_new(q)
        a = data.draw(st.integers(1, q - 1))
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, q - 1) == 1

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
    def test_prime_field_is_integers_mod_p(self, p):
        F = field_new(p)
        for a in range(p):
            for b in range(p):
                assert F.mul(a, b) == (a * b) % p
                assert F.add(a, b) == (a + b) % p


class TestLinearAlgebra:
    """Array helpers, ranks and vector enumeration"""

    def test_vectors_in_base_q_order(self):
        V = field_new(3).vectors(2)
        assert V.shape == (9, 2)
        assert V[0].tolist() == [0, 0]
        assert V[1].tolist() == [0, 1]
        assert V[3].tolist() == [1, 0]

    def test_rank(self):
        F = field_new(2)
        assert F.rank(np.eye(3, dtype=np.int64)) == 3
        assert F.rank([[1, 1], [1, 1]]) == 1
        assert F.rank(np.zeros((2, 2), dtype=np.int64)) == 0

    def test_rank_depends_on_field(self):
        # rows (1, 2) and (2, 1) are dependent over GF(3) only
        M = [[1, 2], [2, 1]]
        assert field_new(3).rank(M) == 1
        assert field_new(5).rank(M) == 2

    def test_matmul_over_gf4(self):
        F = field_new(4)
        assert F.matmul([[2, 1]], [[2], [1]]).tolist() == [[F.add(F.mul(2, 2), 1)]]

    def test_nonzero_elements(self):
        assert field_new(5).nonzero_elements().tolist() == [1, 2, 3, 4]
