import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from arithokounkov.reals import (LogReal, QuadraticNumber, compare_exp, factor_rational,
                                 floor_exp, parse_real, rel_diff)

pos_rationals = st.fractions(min_value=Fraction(1, 1000), max_value=1000).filter(lambda q: q > 0)


def _mp(x: LogReal):
    with mpmath.workdps(60):
        v = mpmath.mpf(x.rational.numerator) / x.rational.denominator
        for a, c in x.terms:
            v += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(a.a if isinstance(a, QuadraticNumber) else a)
        return v


def test_log_atoms_merge():
    x = LogReal.log_of(6) - LogReal.log_of(2) - LogReal.log_of(3)
    assert x.is_zero()
    assert LogReal.log_of(Fraction(5, 2)) == LogReal.log_of(5) - LogReal.log_of(2)


def test_parse_real():
    assert parse_real("1/3") == LogReal(Fraction(1, 3))
    assert parse_real("-1.0") == LogReal(-1)
    assert parse_real("2*log(3) - 1/2") == LogReal.log_of(9) - Fraction(1, 2)
    with pytest.raises(ValueError):
        parse_real("")
    with pytest.raises(ValueError):
        parse_real("log(")


def test_sign_of_close_values():
    # log 3 - 1.0986122886681098 is tiny but positive
    x = LogReal.log_of(3) - Fraction("1.0986122886681098")
    assert x.sign() == (1 if mpmath.log(3) > mpmath.mpf("1.0986122886681098") else -1)
    assert LogReal(0).sign() == 0


def test_floor_exp_examples():
    assert floor_exp(LogReal.log_of(10)) == 10
    assert floor_exp(LogReal(2)) == 7
    assert floor_exp(LogReal.log_of(Fraction(5, 2))) == 2
    assert floor_exp(-LogReal.log_of(2)) == 0


def test_compare_exp_exact_ties():
    assert compare_exp(Fraction(5, 2), LogReal.log_of(Fraction(5, 2))) is True
    assert compare_exp(Fraction(251, 100), LogReal.log_of(Fraction(5, 2))) is False
    # sqrt-type level: y^2 <= e^{log 2} with y^2 = 2 is a tie
    assert compare_exp(2, LogReal.log_of(4) / 2) is True


def test_rel_diff_symmetric():
    assert rel_diff(0, 0) == 0.0
    assert rel_diff(1, 2) == rel_diff(2, 1) == 0.5


@given(pos_rationals)
def test_floor_exp_of_log_is_floor(q):
    assert floor_exp(LogReal.log_of(q)) == math.floor(q)


@given(st.integers(-50, 50), st.lists(st.tuples(st.sampled_from([2, 3, 5, 7]),
                                                st.integers(-6, 6)), max_size=3))
def test_sign_matches_high_precision(r, terms):
    x = LogReal(Fraction(r, 7), terms)
    ref = _mp(x)
    if abs(ref) > mpmath.mpf(10) ** -40:
        assert x.sign() == (1 if ref > 0 else -1)
    lo, hi = x.bounds()
    assert lo <= float(ref) <= hi


@given(pos_rationals, pos_rationals)
def test_log_is_additive(a, b):
    assert LogReal.log_of(a * b) == LogReal.log_of(a) + LogReal.log_of(b)


@given(st.integers(1, 10 ** 6))
def test_factor_rational_roundtrip(n):
    f = factor_rational(n)
    assert math.prod(p ** e for p, e in f.items()) == n
