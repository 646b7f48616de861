import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithokounkov.number_ring import (FieldError, FractionalIdeal, Ideal, NoSuchPrime, delta_constant,
                                       make_field, minkowski_constant, primes_above, residue_data)

FIELDS = ["Q", "Q(sqrt(-1))", "Q(sqrt(2))"]


@pytest.mark.parametrize("descriptor,kappa,disc", [("Q", 1, 1), ("Q(sqrt(-1))", 2, -4), ("Q(sqrt(2))", 2, 8)])
def test_field_data(descriptor, kappa, disc):
    F = make_field(descriptor)
    assert F.degree == kappa
    assert F.discriminant == disc
    assert len(F.integral_basis()) == kappa
    assert F.embedding_det_sq() == disc
    F.check_invariants()


def test_bad_field():
    with pytest.raises((FieldError, ValueError)):
        make_field("Q(sqrt(4))")


@pytest.mark.parametrize("descriptor,value", [("Q", 0.693147), ("Q(sqrt(-1))", 1.039721),
                                        ("Q(sqrt(2))", math.log(2) + math.log(8) / 4)])
def test_minkowski_constant(descriptor, value):
    assert float(minkowski_constant(make_field(descriptor))) == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize("descriptor,value", [("Q", 0.0), ("Q(sqrt(-1))", 0.0), ("Q(sqrt(2))", 0.346574)])
def test_delta_constant(descriptor, value):
    d = delta_constant(make_field(descriptor))
    assert d.sign() >= 0
    assert float(d) == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize("descriptor,p,norm", [("Q", 5, 5), ("Q(sqrt(-1))", 5, 5), ("Q(sqrt(-1))", 3, 9),
                                         ("Q(sqrt(-1))", 2, 2), ("Q(sqrt(2))", 7, 7), ("Q(sqrt(2))", 3, 9)])
def test_residue_norms(descriptor, p, norm):
    assert residue_data(make_field(descriptor), p).norm == norm


def test_splitting_types():
    F = make_field("Q(sqrt(-1))")
    assert len(primes_above(F, 5)) == 2
    assert len(primes_above(F, 3)) == 1
    assert len(primes_above(F, 2)) == 1
    with pytest.raises((NoSuchPrime, ValueError)):
        residue_data(F, 4)


@given(st.sampled_from(FIELDS), st.tuples(st.integers(-9, 9), st.integers(-9, 9)),
       st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_norm_is_multiplicative(descriptor, x, y):
    F = make_field(descriptor)
    x, y = x[:F.degree], y[:F.degree]
    assert F.norm(F.mul(x, y)) == F.norm(x) * F.norm(y)


@given(st.sampled_from(FIELDS), st.tuples(st.integers(-9, 9), st.integers(-9, 9)).filter(any))
def test_principal_ideal_norm(descriptor, x):
    F = make_field(descriptor)
    x = x[:F.degree]
    if not any(x):
        return
    assert Ideal.generated(F, [x]).norm() == abs(F.norm(x))


@pytest.mark.parametrize("descriptor", FIELDS)
def test_fractional_inverse(descriptor):
    F = make_field(descriptor)
    for P in primes_above(F, 5):
        I = FractionalIdeal(P.ideal)
        assert (I * I.inverse()).norm() == 1
        assert (I ** -2).norm() == Fraction(1, P.norm ** 2)
