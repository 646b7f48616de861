import csv
import io
import math

import pytest
from hypothesis import given, strategies as st

from arithokounkov.filtration import (CSV_COLUMNS, FiltrationInstance, InvalidInstance, eq_two_gap,
                                      fiber_decomposition, normalizer, profile, random_instance,
                                      rows_to_csv, run_suite, vanishing_index, verify_key_bounds)
from arithokounkov.normed_module import NormedModule, integer_twist, prime_power_module, trivial_module
from arithokounkov.number_ring import make_field, residue_data
from arithokounkov.reals import LogReal

Q = make_field("Q")
QI = make_field("Q(sqrt(-1))")


def test_normalizer_convention():
    assert normalizer(0).is_zero()
    assert normalizer(1) == 1
    assert normalizer(3) == LogReal.log_of(27) + 3


def test_integers_two_step_chain():
    p = profile(FiltrationInstance(trivial_module(Q), [integer_twist(0), integer_twist(1)]))
    assert p.ranks == [1, 0]
    assert p.lower.is_zero() and p.h0 == LogReal.log_of(3)
    # the upper bound h0(M(-1)) + 1 = 1 misses log 3 by log 3 - 1
    assert p.minimal_C() == pytest.approx(math.log(3) - 1)


def test_empty_chain():
    p = profile(FiltrationInstance(NormedModule.box(Q, [1, 1]), []))
    assert p.ranks == [2] and p.lower.is_zero() and p.upper == p.h0
    assert p.minimal_C() == 0.0


def test_radius_ten_plane():
    M = NormedModule.box(Q, [10, 10])
    inst = FiltrationInstance(M, [integer_twist(0), integer_twist(LogReal.log_of(2)),
                                  integer_twist(LogReal.log_of(5))])
    p = profile(inst)
    assert p.ranks == [2, 2, 2] and p.counts == [441, 121, 25]
    assert p.lower == LogReal.log_of(25) and p.h0 == LogReal.log_of(441)
    r = verify_key_bounds(inst, 1, prof=p)
    assert r["lower_holds"] and r["upper_holds"]


def test_gaussian_prime_chain():
    P = residue_data(QI, 2)
    inst = FiltrationInstance(NormedModule.box(QI, [3, 3]), [prime_power_module(P, -i) for i in range(4)])
    p = profile(inst)
    assert p.ranks == [2, 2, 2, 2] and p.counts == [841, 169, 81, 25]
    assert p.minimal_C() == 0.0


def test_invalid_chains():
    with pytest.raises(InvalidInstance):
        FiltrationInstance(trivial_module(Q), [integer_twist(1)])
    with pytest.raises(InvalidInstance):
        FiltrationInstance(trivial_module(Q), [integer_twist(0), integer_twist(2), integer_twist(1)])


def test_fiber_decomposition_examples():
    assert fiber_decomposition(NormedModule.box(Q, [1, 1]), residue_data(Q, 2)) == [2, 0]
    assert fiber_decomposition(NormedModule.box(Q, [3, 3]), residue_data(Q, 3)) == [2, 2, 0]
    assert vanishing_index(NormedModule.box(Q, [3, 3]), residue_data(Q, 3)) == 2
    g = eq_two_gap(NormedModule.box(Q, [1, 1]), residue_data(Q, 2))
    assert g["gap"] == pytest.approx(math.log(9) - 2 * math.log(2))
    assert eq_two_gap(NormedModule.box(Q, []), residue_data(Q, 2))["gap"] == 0.0


def test_split_weight_counterexample_is_reproducible():
    # a chain element of positive degree whose norms are (w, 1/w) can have
    # more short vectors than the trivial twist: r0 = 0 < r1 = 1, so the lower
    # bound 1/10 exceeds h0 = 0 and no finite C works
    inst = random_instance(make_field("Q(sqrt(2))"), 42, 26, 2)
    p = profile(inst)
    assert p.ranks[:2] == [0, 1] and not p.monotone
    assert p.h0.is_zero() and p.lower.sign() > 0
    assert math.isinf(p.minimal_C())


def test_suite_csv_and_determinism():
    a = run_suite("Q(sqrt(-1))", 6, seed=3)
    b = run_suite("Q(sqrt(-1))", 6, seed=3, workers=2)
    assert a["summary"] == b["summary"]
    text = rows_to_csv(a["rows"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0].keys()) == CSV_COLUMNS
    assert all(r["kappa"] == "2" for r in rows)
    empty = run_suite("Q", 0)
    assert empty["rows"] == [] and rows_to_csv([]).strip() == ",".join(CSV_COLUMNS)


def test_suite_has_no_violations_at_fitted_C():
    s = run_suite("Q", 40, seed=7)["summary"]
    assert s["completed"] == 40 and s["violations_at_fitted_C"] == []


@given(st.sampled_from(["Q", "Q(sqrt(-1))", "Q(sqrt(2))"]), st.integers(0, 10 ** 6), st.integers(0, 50))
def test_minimal_C_makes_both_bounds_hold(descriptor, seed, idx):
    inst = random_instance(make_field(descriptor), seed, idx)
    p = profile(inst)
    C = p.minimal_C()
    if math.isinf(C):
        assert p.r0 == 0
        return
    r = verify_key_bounds(inst, C, prof=p)
    assert r["lower_holds"] and r["upper_holds"]


@given(st.sampled_from(["Q", "Q(sqrt(-1))", "Q(sqrt(2))"]), st.integers(0, 10 ** 6), st.integers(0, 50))
def test_chain_degrees_sorted(descriptor, seed, idx):
    inst = random_instance(make_field(descriptor), seed, idx)
    assert inst.degrees[0].is_zero()
    assert all((b - a).sign() >= 0 for a, b in zip(inst.degrees, inst.degrees[1:]))
