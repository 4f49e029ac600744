from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casoratian.determinants import (
    casorati_det,
    casorati_matrix,
    check_g_equals_casorati,
    check_tau_factorization,
    g_det,
    g_matrix,
    hankel_det,
    tau,
    tau_from_g,
    tau_matrix,
    tau_split,
)
from casoratian.errors import TableRangeError
from casoratian.numeric import det_bruteforce, det_exact
from casoratian.series import (
    CoefficientTable,
    DeltaSchedule,
    PoleModel,
    build_table,
    recurrence_from_poles,
    shift_table,
)
from conftest import random_fraction, small_fraction


def random_table(rng, K=8, N=6) -> CoefficientTable:
    rows = tuple(tuple(random_fraction(rng) for _ in range(K)) for _ in range(N + 1))
    return CoefficientTable(rows, "exact", "poles")


def hand_table():
    return build_table(PoleModel.shared([2, 1]), 4, 4)


class TestSmallOrders:
    def test_order_zero_is_one(self, rng):
        table = random_table(rng)
        assert casorati_det(table, 3, 0, 2) == 1
        assert g_det(table, 1, 0, 2, 2) == 1
        assert hankel_det([5, 6], 0, 1) == 1

    def test_order_one_is_entry(self, rng):
        table = random_table(rng)
        assert casorati_det(table, 3, 1, 2) == table.a(3, 2)
        assert g_det(table, 4, 1, 1, 3) == table.a(4, 1)
        assert hankel_det([5, 6, 7], 1, 2) == 7

    def test_two_by_two_casorati_by_hand(self):
        # a_k^(n) = 2^(n+k+1) + 1
        # det [[a_0^(0), a_1^(0)], [a_0^(1), a_1^(1)]] = 3*9 - 5*5
        assert casorati_det(hand_table(), 0, 2, 0) == 2

    def test_matrix_layouts(self):
        table = hand_table()
        assert casorati_matrix(table, 1, 2, 0) == [[5, 9], [9, 17]]
        assert g_matrix(table, 0, 2, 0, 2) == [[3, 5], [9, 17]]

    def test_out_of_range(self):
        with pytest.raises(TableRangeError):
            casorati_det(hand_table(), 3, 2, 0)
        with pytest.raises(TableRangeError):
            hankel_det([1, 2, 3], 2, 1)


class TestTau:
    def test_split(self):
        assert tau_split(7, 2) == (1, 2)
        assert tau_split(0, 1) == (0, 0)
        with pytest.raises(ValueError):
            tau_split(-1, 1)

    def test_m1_k3_layout(self):
        # k = 1 + 1*2: one 2x2 block row plus a size-1 block
        table = hand_table()
        a = lambda k: table.a(k, 0)  # noqa: E731
        assert tau_matrix(table, 3, 0, 1) == [
            [a(0), 0, a(1)],
            [0, a(1), 0],
            [a(1), 0, a(2)],
        ]

    @pytest.mark.parametrize("i", [1, 2])
    def test_m2_j1_against_leibniz(self, rng, i):
        table = random_table(rng, K=10)
        k = i + 3
        lhs = det_bruteforce(tau_matrix(table, k, 1, 2))
        rhs = 1
        for ell in range(3):
            j = 2 if ell < i else 1
            rhs = rhs * det_bruteforce(g_matrix(table, ell, j, 1, 2))
        assert lhs == rhs

    def test_m1_i0_j1_against_leibniz(self, rng):
        table = random_table(rng)
        lhs = det_bruteforce(tau_matrix(table, 2, 0, 1))
        rhs = det_bruteforce(g_matrix(table, 0, 1, 0, 1)) * det_bruteforce(g_matrix(table, 1, 1, 0, 1))
        assert lhs == rhs

    @pytest.mark.parametrize("M", [1, 2, 3])
    def test_factorization_on_random_tables(self, rng, M):
        table = random_table(rng, K=4 * (M + 1) + 2)
        for j in range(3):
            for i in range(M + 1):
                assert check_tau_factorization(table, j, i, 0, M).passed

    def test_methods_agree(self, rng):
        table = random_table(rng, K=12)
        for k in range(8):
            assert tau(table, k, 1, 2) == tau(table, k, 1, 2, method="product") == tau_from_g(table, k, 1, 2)

    def test_i_outside_range(self, rng):
        with pytest.raises(ValueError):
            check_tau_factorization(random_table(rng), 1, 3, 0, 2)


class TestGEqualsCasorati:
    def test_m2_j2_i1(self):
        table = recurrence_from_poles(PoleModel.shared([5, 3]), 10, 3, 2, DeltaSchedule.constant(1))
        check = check_g_equals_casorati(table, 1, 2, 0, 2)
        assert check.passed
        assert check.lhs == det_exact(casorati_matrix(table, 1, 2, 0))

    def test_varying_delta_j3(self):
        schedule = DeltaSchedule.sequence([Fraction(1, n + 1) for n in range(8)])
        table = recurrence_from_poles(PoleModel.shared([7, 5, 3]), 14, 4, 2, schedule)
        for i in range(3):
            check = check_g_equals_casorati(table, i, 3, 0, 2)
            assert check.passed
            assert check.rhs == det_exact(casorati_matrix(table, i, 3, 0))

    @pytest.mark.parametrize("sign", [1, -1])
    def test_either_evolution_sign(self, sign):
        table = recurrence_from_poles(
            PoleModel.shared([5, 3, 2]), 12, 3, 2, DeltaSchedule.harmonic(1, 1, 1), sign=sign
        )
        assert all(check_g_equals_casorati(table, i, j, 0, 2).passed for i in range(3) for j in range(4))

    def test_rejects_pole_table(self):
        with pytest.raises(ValueError):
            check_g_equals_casorati(hand_table(), 0, 2, 0, 1)

    def test_rejects_mismatched_degree(self):
        table = recurrence_from_poles(PoleModel.shared([5, 3]), 10, 3, 2, DeltaSchedule.constant(1))
        with pytest.raises(ValueError):
            check_g_equals_casorati(table, 0, 2, 0, 1)

    def test_fails_on_generic_rows(self, rng):
        # a random table has no evolution relation: G and C differ
        table = random_table(rng)
        g = g_det(table, 0, 2, 0, 2)
        c = casorati_det(table, 0, 2, 0)
        assert g != c


class TestHankelEmbedding:
    def test_geometric(self):
        seq = [3**n for n in range(8)]
        assert hankel_det(seq, 2, 0) == 0
        assert hankel_det(seq, 1, 5) == 243

    @settings(max_examples=40, deadline=None)
    @given(st.lists(small_fraction, min_size=9, max_size=9), st.integers(1, 3), st.integers(0, 2))
    def test_casorati_of_shift_is_hankel(self, seq, j, n):
        table = shift_table(seq)
        assert casorati_det(table, 0, j, n) == hankel_det(seq, j, n)
