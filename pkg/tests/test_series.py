from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casoratian.errors import TableRangeError
from casoratian.numeric import FLOAT
from casoratian.series import (
    POLES,
    RECURRENCE,
    DeltaSchedule,
    PoleModel,
    build_table,
    coeff_from_poles,
    evolution_rates,
    evolve_table,
    recurrence_from_poles,
    shift_table,
)
from conftest import small_fraction


class TestPoleModel:
    def test_shared_sum_at_origin(self, two_one_model):
        # 2^1 + 1^1
        assert coeff_from_poles(two_one_model, 0, 0) == 3

    @pytest.mark.parametrize("k,n", [(0, 0), (3, 7), (10, 2)])
    def test_unit_pole_is_constant(self, k, n):
        assert coeff_from_poles(PoleModel.shared([1]), k, n) == 1

    def test_tail_contributes(self):
        model = PoleModel.shared([4, 2, 1], tail_poles=[Fraction(1, 2)])
        assert coeff_from_poles(model, 0, 1) == 16 + 4 + 1 + Fraction(1, 4)

    def test_per_column_poles(self):
        model = PoleModel.per_column([[3], [2]], coefficients=[[2], [5]])
        assert coeff_from_poles(model, 0, 1) == 2 * 3**2
        assert coeff_from_poles(model, 1, 0) == 5 * 2**2
        with pytest.raises(TableRangeError):
            model.column(2)

    def test_float_mode_rounds_once(self):
        model = PoleModel.shared([Fraction(1, 3)])
        assert coeff_from_poles(model, 0, 0, FLOAT) == 1 / 3

    @pytest.mark.parametrize(
        "poles,tail",
        [([2, 2], []), ([1, 2], []), ([2, -2], []), ([3, 0], []), ([2, 1], [1])],
    )
    def test_moduli_must_strictly_decrease(self, poles, tail):
        with pytest.raises(ValueError):
            PoleModel.shared(poles, tail_poles=tail)

    def test_zero_coefficient_rejected(self):
        with pytest.raises(ValueError):
            PoleModel.shared([2, 1], coefficients=[1, 0])

    def test_rho_convention(self):
        model = PoleModel.shared([4, 2, 1], tail_poles=[Fraction(1, 2)])
        assert model.rho(0) == Fraction(3, 4)
        assert model.rho(0, 1) == 3
        assert model.rho(0, 4) == Fraction(1, 4)
        assert PoleModel.shared([4, 2, 1]).rho(0) == Fraction(1, 2)

    def test_json_echo(self):
        model = PoleModel.shared([4, 2], tail_poles=["1/2"])
        assert model.to_json()["tail_poles"] == [["1/2"]]


class TestEvolution:
    def test_minus_convention_example(self):
        # (5-3, 9-5)
        assert evolve_table((3, 5, 9), 1, M=1, sign=-1) == (2, 4)

    def test_default_sign_adds(self):
        assert evolve_table((3, 5, 9), 1, M=1) == (8, 14)

    def test_hungry_row_shrinks_by_M(self):
        row = evolve_table(tuple(range(1, 8)), Fraction(1, 2), M=3)
        assert len(row) == 4
        assert row[0] == 4 + Fraction(1, 16) * 1

    def test_short_row_rejected(self):
        with pytest.raises(ValueError):
            evolve_table((1, 2), 1, M=2)

    @pytest.mark.parametrize("M", [1, 2, 3])
    @pytest.mark.parametrize("delta", [1, -1, Fraction(3, 2)])
    def test_shared_poles_evolve_geometrically(self, M, delta):
        poles = [5, 3, 2]
        model = PoleModel.shared(poles)
        table = recurrence_from_poles(model, 12, 3, M, DeltaSchedule.constant(delta))
        rates = evolution_rates(poles, M, delta)
        for n in range(4):
            for k in range(table.width(n)):
                expected = sum(r ** (k + 1) * lam**n for r, lam in zip(poles, rates))
                assert table.a(k, n) == expected


class TestBuildTable:
    def test_pole_table_values(self, two_one_model):
        table = build_table(two_one_model, 2, 2)
        assert table.rows == ((3, 5), (5, 9), (9, 17))
        assert table.provenance == POLES

    def test_zero_delta_shifts_seed(self, two_one_model):
        seed = [coeff_from_poles(two_one_model, k, 0) for k in range(6)]
        table = build_table(seed, 6, 4, M=1, schedule=DeltaSchedule.constant(0))
        for n in range(5):
            assert list(table.rows[n]) == seed[n:]

    def test_single_row(self):
        table = build_table([1, 2, 3], 3, 0, M=1, schedule=DeltaSchedule.constant(1))
        assert table.rows == ((1, 2, 3),)

    def test_recurrence_needs_width(self):
        with pytest.raises(ValueError):
            build_table([1, 2, 3], 3, 3, M=1, schedule=DeltaSchedule.constant(1))

    def test_out_of_range_access(self, two_one_model):
        table = build_table(two_one_model, 2, 2)
        with pytest.raises(TableRangeError):
            table.a(2, 0)
        with pytest.raises(TableRangeError):
            table.a(0, 3)

    def test_recurrence_satisfies_its_relation(self):
        model = PoleModel.shared([3, 2])
        schedule = DeltaSchedule.harmonic(1, 1, 1)
        table = recurrence_from_poles(model, 10, 4, 2, schedule)
        assert table.provenance == RECURRENCE
        assert table.satisfies_evolution()

    def test_dominant_ratio(self):
        table = build_table(PoleModel.shared([3, 2]), 1, 40)
        ratio = table.a(0, 40) / table.a(0, 39)
        assert abs(float(ratio) - 3) < 2 * (2 / 3) ** 39 * 3


class TestSchedule:
    def test_kinds(self):
        assert DeltaSchedule.constant(2).exact(9) == 2
        assert DeltaSchedule.harmonic(1, 1, 1).exact(0) == 2
        assert DeltaSchedule.harmonic(1, 1, 1).exact(3) == Fraction(5, 4)
        assert DeltaSchedule.harmonic(0, 1, 1).limit == 0
        seq = DeltaSchedule.sequence([1, 2, 3])
        assert seq.exact(2) == 3 and not seq.has_limit
        with pytest.raises(ValueError):
            seq.exact(3)

    def test_json(self):
        assert DeltaSchedule.harmonic("1/2", 3, 2).to_json() == {
            "kind": "harmonic", "base": "1/2", "scale": "3", "offset": 2,
        }


@settings(max_examples=50, deadline=None)
@given(st.lists(small_fraction, min_size=4, max_size=4))
def test_shift_table_is_shift_of_sequence(seq):
    table = shift_table(seq)
    for n in range(4):
        for k in range(4 - n):
            assert table.a(k, n) == seq[n + k]


@settings(max_examples=50, deadline=None)
@given(
    st.lists(small_fraction, min_size=7, max_size=7),
    small_fraction,
    st.integers(1, 3),
    st.sampled_from([1, -1]),
)
def test_evolution_is_linear(row, delta, M, sign):
    doubled = evolve_table([2 * x for x in row], delta, M, sign)
    assert doubled == tuple(2 * x for x in evolve_table(row, delta, M, sign))
