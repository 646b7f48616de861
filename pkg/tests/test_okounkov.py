import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arithokounkov.okounkov import (RationalPolygon, bc_incidence, bc_volume_report, canonical,
                                    convex_hull, counting_limit_report, hull_oracle, lambda_points,
                                    main_identity_report, polygon_svg, scaled_image)
from arithokounkov.reals import rel_diff
from arithokounkov.surface_model import SurfaceBundle, unit_box
from arithokounkov.valuation import FlagData, GenericFlag, clear_cache

NOT_BIG = SurfaceBundle.parse("box:1/2,1/2")
qpts = st.tuples(st.fractions(0, 1).map(lambda q: q.limit_denominator(20)),
                 st.fractions(0, 1).map(lambda q: q.limit_denominator(20)))


def test_triangle_and_degenerate():
    T = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert T.area == Fraction(1, 2) and not T.degenerate
    P = convex_hull([(Fraction(1, 3), Fraction(1, 2))])
    assert P.degenerate and P.area == 0
    S = convex_hull([(0, 0), (1, 1), (2, 2)])
    assert S.degenerate and S.area == 0


def test_polygon_membership():
    T = convex_hull([(0, 0), (2, 0), (0, 2)])
    assert T.contains((Fraction(1, 2), Fraction(1, 2)))
    assert T.contains((1, 1))
    assert not T.contains((Fraction(3, 2), 1))
    assert T.contains_polygon(convex_hull([(0, 0), (1, 0), (0, 1)]))


def test_lambda_small_cases():
    clear_cache()
    assert lambda_points(unit_box(1), FlagData(2, 0), 1) == {(0, 0), (0, 1)}
    assert lambda_points(NOT_BIG, FlagData(2, 0), 3) == set()
    img = scaled_image(unit_box(1), FlagData(2, 0), 2)
    assert all(0 <= a <= 1 and 0 <= b <= 1 and (2 * a).denominator == 1 for a, b in img)
    assert {(0, 0), (0, Fraction(1, 2)), (0, 1)} <= img


@pytest.mark.parametrize("p,area", [(2, Fraction(3, 8)), (3, Fraction(2, 9)), (5, Fraction(1, 8))])
def test_lambda_hull_k4(p, area):
    pts = lambda_points(unit_box(1), FlagData(p, 0), 4)
    H = convex_hull(pts)
    assert H.area == area
    assert canonical(H) == canonical(hull_oracle(pts))


def test_lambda_monotone_in_k():
    sizes = [len(lambda_points(unit_box(1), FlagData(2, 0), k)) for k in range(1, 5)]
    assert sizes == sorted(sizes)
    areas = [convex_hull(lambda_points(unit_box(1), FlagData(3, 0), k)).area for k in range(1, 6)]
    assert areas == sorted(areas)


def test_counting_report_gaps_shrink():
    r = counting_limit_report(unit_box(1), FlagData(2, 0), 8)
    gaps = [row["gap"] for row in r["rows"]]
    assert gaps[-1] < gaps[0] and not r["partial"]
    assert r["rows"][0]["gap"] == pytest.approx(math.log(9) - 2 * math.log(2))
    z = counting_limit_report(NOT_BIG, FlagData(2, 0), 4)
    assert all(row["count_ratio"] == 0 and row["h0_ratio"] == 0 for row in z["rows"])


def test_main_identity_not_big():
    rep, hull, pts = main_identity_report(NOT_BIG, FlagData(2, 0), 4)
    assert not rep["big"] and rep["degenerate_hull"]
    assert rep["area_log_p"] == rep["count_ratio_log_p"] == rep["half_volume"] == 0.0


def test_main_identity_p3_vs_p5():
    r3, h3, _ = main_identity_report(unit_box(1), FlagData(3, 0), 6)
    r5, h5, _ = main_identity_report(unit_box(1), FlagData(5, 0), 6)
    assert h3.area != h5.area
    assert r3["half_volume"] == r5["half_volume"]
    for r in (r3, r5):
        assert rel_diff(r["area_log_p"], r["half_volume"]) < 0.5


def test_archimedean_profile():
    prof = bc_incidence(unit_box(1), GenericFlag(0), None, 6, 16, "archimedean")
    assert not prof.empty and prof.decreasing
    assert prof.G(Fraction(1, 2)) > 0
    assert all(prof.G(Fraction(j, 6)) >= 0 for j in range(7))
    # beyond the largest twist the slices are empty
    assert prof.segments[-1] is not None and prof.G(Fraction(7, 6)) is None


def test_empty_profile_for_not_big():
    prof = bc_incidence(NOT_BIG, GenericFlag(0), None, 6, 16, "archimedean")
    assert prof.empty
    rep = bc_volume_report(prof, NOT_BIG)
    assert rep["volume"] == rep["half_volume"] == rep["rel_diff"] == 0.0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_finite_side_recovers_lambda(p):
    prof = bc_incidence(unit_box(1), None, FlagData(p, 0), 6, 16, "finite")
    H = convex_hull(scaled_image(unit_box(1), FlagData(p, 0), 6))
    assert prof.decreasing
    # the body lives in (nu2/k, tau) coordinates with nu1/k = tau * t_scale
    ts = Fraction(prof.t_scale_exact)
    body = convex_hull([(y * ts, x) for x, y in prof.body.vertices])
    assert canonical(body) == canonical(H)
    assert prof.volume == pytest.approx(float(H.area) * math.log(p))


def test_grid_refinement():
    a = bc_incidence(unit_box(1), GenericFlag(0), None, 8, 16, "archimedean")
    b = bc_incidence(unit_box(1), GenericFlag(0), None, 8, 32, "archimedean")
    assert abs(a.area_staircase - b.area_staircase) <= a.refinement_bound
    assert b.area_staircase >= a.area_staircase - 1e-15


def test_svg_output():
    svg = polygon_svg(convex_hull([(0, 0), (1, 0), (0, 1)]), points=[(0, 0)])
    assert svg.startswith("<svg") and "polygon" in svg


@given(st.lists(qpts, min_size=0, max_size=40))
def test_hull_matches_oracle(pts):
    assert canonical(convex_hull(pts)) == canonical(hull_oracle(pts))


@given(st.lists(qpts, min_size=1, max_size=30))
def test_hull_contains_inputs_and_is_valid(pts):
    H = convex_hull(pts)
    H.check_invariants()
    assert all(H.contains(q) for q in pts)
    assert H.area >= 0


@given(st.lists(qpts, min_size=1, max_size=20), st.lists(qpts, max_size=10))
def test_hull_monotone(a, b):
    assert convex_hull(a + b).area >= convex_hull(a).area
