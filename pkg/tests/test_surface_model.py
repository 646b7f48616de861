import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithokounkov.normed_module import naive_short_vectors, short_vectors
from arithokounkov.reals import LogReal
from arithokounkov.surface_model import (BoxWeights, FSScaled, SurfaceBundle, h0_closed_form,
                                         h0_hat_power, power, sections_lattice, superadditivity_check,
                                         unit_box, volume_estimate)

box_weights = st.lists(st.integers(1, 12).map(lambda x: Fraction(x, 4)), min_size=1, max_size=4)


def test_parse_and_json_roundtrip():
    B = SurfaceBundle.parse("box:1,1/2,3")
    assert B.level == 2 and B.family.weights == (1, Fraction(1, 2), 3)
    assert SurfaceBundle.from_json(B.to_json()) == B
    F = SurfaceBundle.parse("fs:-1", level=2)
    assert SurfaceBundle.from_json(F.to_json()) == F
    with pytest.raises(ValueError):
        SurfaceBundle.parse("cone:1")
    with pytest.raises(ValueError):
        SurfaceBundle(1, BoxWeights((1,)))


def test_level_zero_is_integers():
    S = short_vectors(sections_lattice(SurfaceBundle(0, BoxWeights((1,)))))
    assert S.count == 3


def test_unit_box_levels():
    assert h0_hat_power(unit_box(1), 1) == LogReal.log_of(9)
    assert power(unit_box(1), 2).family.weights == (1, 2, 1)
    assert h0_hat_power(unit_box(1), 2) == LogReal.log_of(45)


def test_fs_level_two_contains_2x():
    M = sections_lattice(SurfaceBundle(2, FSScaled(0)))
    assert M.is_short([0, 2, 0]) is True
    assert M.is_short([0, 3, 0]) is False


def test_fs_power_is_multiplicative():
    B = SurfaceBundle.parse("fs:-1/2", level=1)
    assert power(B, 3) == SurfaceBundle(3, FSScaled(Fraction(-3, 2)))


def test_not_big_family():
    B = SurfaceBundle.parse("box:1/2,1/2")
    est = volume_estimate(B, 4)
    assert not est.big and est.last == 0.0
    assert h0_hat_power(B, 3).is_zero()


def test_volume_estimate_unit_box():
    est = volume_estimate(unit_box(1), 6)
    assert est.big and not est.partial
    vals = [v for _, _, v in est.entries]
    assert all(v > 0 for v in vals)
    with pytest.raises(ValueError):
        volume_estimate(unit_box(1), 2)


def test_fs_volume_sequence_partial_under_budget():
    est = volume_estimate(SurfaceBundle.parse("fs:-1"), 8, budget=10 ** 6)
    assert est.partial and est.failed_at is not None
    assert [k for k, _, _ in est.entries] == list(range(1, est.failed_at))
    assert all(h.sign() > 0 for _, h, _ in est.entries)


@given(box_weights, st.integers(1, 3))
def test_closed_form_matches_enumeration(w, k):
    B = SurfaceBundle(len(w) - 1, BoxWeights(tuple(w)))
    if len(w) * k > 8:
        k = 1
    assert h0_closed_form(power(B, k)) == h0_hat_power(B, k)


@given(box_weights, st.integers(1, 2), st.integers(1, 2))
def test_superadditivity(w, k1, k2):
    B = SurfaceBundle(len(w) - 1, BoxWeights(tuple(w)))
    assert superadditivity_check(B, k1, k2, sample=60)["holds"]


@given(st.integers(-2, 2).map(lambda x: Fraction(x, 2)))
def test_fs_enumeration_matches_oracle(lam):
    M = sections_lattice(SurfaceBundle(1, FSScaled(lam)))
    assert short_vectors(M).as_set() == naive_short_vectors(M)
