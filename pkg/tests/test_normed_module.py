import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arithokounkov.normed_module import (BudgetExceeded, FubiniStudySup, NormedModule, deg_hat,
                                         dual_rank_one, gs_shift_check, h0_hat, integer_twist,
                                         minkowski_check, naive_short_vectors, prime_power_module,
                                         rank_inequalities_check, rank_one, short_vectors,
                                         tensor_rank_one, trivial_module)
from arithokounkov.number_ring import make_field, residue_data
from arithokounkov.reals import LogReal

Q = make_field("Q")
QI = make_field("Q(sqrt(-1))")
Q2 = make_field("Q(sqrt(2))")

weights = st.fractions(min_value=Fraction(1, 4), max_value=4).map(lambda w: w.limit_denominator(12))


def test_unit_interval():
    S, h = h0_hat(trivial_module(Q))
    assert S.as_set() == {(-1,), (0,), (1,)}
    assert h == LogReal.log_of(3)


def test_plane_box_twisted():
    M = NormedModule.box(Q, [1, 1]).twist(LogReal.log_of(Fraction(5, 2)))
    S, h = h0_hat(M)
    assert S.count == 25 and h == LogReal.log_of(25)


def test_gaussian_unit_disc():
    S = short_vectors(trivial_module(QI))
    assert S.as_set() == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}


@pytest.mark.parametrize("alpha,count", [(LogReal(0), 3), (LogReal.log_of(10), 21), (-LogReal.log_of(2), 1)])
def test_twists_of_integers(alpha, count):
    assert short_vectors(trivial_module(Q).twist(alpha)).count == count


def test_degrees():
    assert deg_hat(trivial_module(Q)).is_zero()
    assert deg_hat(integer_twist(Fraction(3, 2))) == Fraction(3, 2)
    for descriptor in ("Q", "Q(sqrt(-1))", "Q(sqrt(2))"):
        P = residue_data(make_field(descriptor), 5)
        assert deg_hat(prime_power_module(P, -3)) == LogReal.log_of(P.norm) * 3


def test_degree_independent_of_witness():
    P = residue_data(QI, 5)
    L = prime_power_module(P, -1)
    basis = [tuple(int(x) for x in row) for row in L.lattice.integral.basis]
    d0 = deg_hat(L)
    assert deg_hat(L, witness=(2, 1)) == d0


def test_dual_and_tensor():
    P = residue_data(QI, 5)
    L = prime_power_module(P, -2)
    assert deg_hat(dual_rank_one(L)) == -deg_hat(L)
    assert deg_hat(dual_rank_one(trivial_module(QI))).is_zero()
    assert deg_hat(dual_rank_one(integer_twist(2))) == -2
    M = NormedModule.box(Q, [1, 1])
    assert short_vectors(tensor_rank_one(M, trivial_module(Q))).count == 9
    two = prime_power_module(residue_data(Q, 2), 1)
    assert short_vectors(tensor_rank_one(M, two)).count == 1
    tw = tensor_rank_one(M, integer_twist(LogReal.log_of(3)))
    assert short_vectors(tw).count == short_vectors(M.twist(LogReal.log_of(3))).count == 49


def test_span_ranks():
    S = short_vectors(NormedModule.box(Q, [1, 1]))
    assert S.z_rank() == 2 and S.ok_rank() == 2
    S = short_vectors(trivial_module(QI))
    assert S.ok_rank() == 1 and S.z_rank() == 2
    S = short_vectors(trivial_module(Q).twist(-LogReal.log_of(2)))
    assert S.count == 1 and S.z_rank() == 0


def test_rank_zero_module():
    S = short_vectors(NormedModule.box(Q, []))
    assert S.count == 1 and S.materialize().shape == (1, 0) and S.ok_rank() == 0


def test_minkowski_examples():
    r = minkowski_check(integer_twist(2))
    assert r["h0"] == LogReal.log_of(15) and r["holds"]
    assert minkowski_check(integer_twist(0))["holds"]
    L = rank_one(QI, scale=1)
    r = minkowski_check(L)
    assert deg_hat(L) == 2 and r["holds"]


def test_gs_shift_examples():
    r = gs_shift_check(trivial_module(Q), LogReal.log_of(2))
    assert r["h0_twisted"] == LogReal.log_of(5) and r["holds"]
    assert float(r["margin"]) == pytest.approx(math.log(3) - math.log(5) + math.log(2) + math.log(3))
    assert gs_shift_check(trivial_module(Q), 0)["holds"]
    with pytest.raises(ValueError):
        gs_shift_check(trivial_module(Q), -1)


def test_fs_level_one_and_two():
    M = NormedModule(Q, 2, FubiniStudySup(1))
    assert short_vectors(M).as_set() == naive_short_vectors(M)
    M2 = NormedModule(Q, 3, FubiniStudySup(2))
    S = short_vectors(M2)
    # 2x is a monomial (decided exactly); +-1 +- x^2 are non-monomial ties
    assert (0, 2, 0) in S.as_set()
    assert S.count == 9 and S.undecided == 4
    assert {tuple(r) for r in S.undecided_points.tolist()} == {(a, 0, b) for a in (-1, 1) for b in (-1, 1)}


def test_budget_is_enforced():
    M = NormedModule.box(Q, [1] * 8).twist(20)
    with pytest.raises(BudgetExceeded):
        short_vectors(M, budget=1000).materialize(limit=1000)


def test_conjugation_invariance_required():
    from arithokounkov.normed_module import WeightedMax
    with pytest.raises(ValueError):
        NormedModule(QI, 1, [WeightedMax((1,)), WeightedMax((2,))])


@given(st.sampled_from([Q, QI, Q2]), st.lists(weights, min_size=1, max_size=2),
       st.fractions(min_value=-1, max_value=1).map(lambda a: a.limit_denominator(8)))
def test_enumerator_matches_oracle(F, w, alpha):
    M = NormedModule.box(F, w).twist(alpha)
    assert short_vectors(M).as_set() == naive_short_vectors(M)


@given(st.sampled_from([Q, QI, Q2]), st.lists(weights, min_size=1, max_size=2),
       st.fractions(min_value=0, max_value=2).map(lambda a: a.limit_denominator(8)))
def test_twist_monotone(F, w, t):
    M = NormedModule.box(F, w)
    small, big = short_vectors(M).as_set(), short_vectors(M.twist(t)).as_set()
    assert small <= big


@given(st.sampled_from([Q, QI, Q2]), st.lists(weights, min_size=1, max_size=3),
       st.integers(0, 20))
def test_gs_shift_property(F, w, k):
    assert gs_shift_check(NormedModule.box(F, w), Fraction(k, 20))["holds"]


@given(st.sampled_from([Q, QI, Q2]), st.lists(weights, min_size=1, max_size=3))
def test_rank_inequalities_property(F, w):
    assert rank_inequalities_check(NormedModule.box(F, w))["holds"]


@given(st.sampled_from([Q, QI, Q2]), weights,
       st.fractions(min_value=-1, max_value=2).map(lambda a: a.limit_denominator(6)))
def test_minkowski_property(F, w, alpha):
    assert minkowski_check(rank_one(F, weight=w, scale=alpha))["holds"]


@given(st.sampled_from([Q, QI, Q2]), st.lists(weights, min_size=1, max_size=2))
def test_h0_nonnegative_and_contains_zero(F, w):
    S = short_vectors(NormedModule.box(F, w))
    assert S.contains(np.zeros(S.module.width, dtype=np.int64))
    assert S.h0().sign() >= 0
