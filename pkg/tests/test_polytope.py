from fractions import Fraction
from itertools import product as iter_product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiroot import polytope, root_datum


def test_fm_feasible_box():
    point = polytope.fm_feasible(
        [((1, 0), 2), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 1)], 2
    )
    assert point is not None
    x, y = point
    assert 0 <= x <= 2 and -1 <= y <= 1


def test_fm_infeasible():
    assert polytope.fm_feasible([((1,), 0), ((-1,), -1)], 1) is None


def test_fm_equality_slice():
    point = polytope.fm_feasible([((1, 1), 3), ((-1, -1), -3), ((1, -1), 0)], 2)
    assert point is not None
    assert point[0] + point[1] == 3


def test_positive_functional():
    phi = polytope.positive_functional([(2, -1), (-1, 2)])
    assert phi is not None
    for v in [(2, -1), (-1, 2)]:
        assert polytope.dot_f(phi, v) >= 1


def test_positive_functional_fails_on_opposites():
    assert polytope.positive_functional([(1,), (-1,)]) is None
    assert polytope.positive_functional([(0, 0)]) is None


def test_convex_hull_square():
    pts = [(x, y) for x in range(3) for y in range(3)]
    hull = polytope.convex_hull_2d(pts)
    assert set(hull) == {(0, 0), (2, 0), (2, 2), (0, 2)}


def test_hull_contains_orbit_sl2():
    sl2 = root_datum.fixture("sl2")
    assert polytope.hull_contains_orbit(sl2, (1,), (3,))
    assert not polytope.hull_contains_orbit(sl2, (4,), (3,))
    assert polytope.hull_contains_orbit(sl2, (3,), (3,))


def test_hull_contains_orbit_sl3():
    sl3 = root_datum.fixture("sl3")
    assert polytope.hull_contains_orbit(sl3, (0, 0), (1, 1))
    assert not polytope.hull_contains_orbit(sl3, (1, 1), (1, 0))


def test_orbit_hull_membership():
    sp4 = root_datum.fixture("sp4")
    hull = polytope.orbit_hull(sp4, (2, 1))
    for v in root_datum.orbit(sp4, (2, 1)):
        assert hull.contains(v)
    assert hull.contains((0, 0))
    assert not hull.contains((3, 0))


def test_criteria_true_pair():
    sl2 = root_datum.fixture("sl2")
    crit = polytope.order_criteria_agree(sl2, (1,), (3,))
    assert tuple(crit) == (True, True, True)


def test_criteria_incomparable_pair():
    sl3 = root_datum.fixture("sl3")
    crit = polytope.order_criteria_agree(sl3, (1, 0), (0, 1))
    assert tuple(crit) == (False, False, False)


def test_criteria_equal_pair():
    g2 = root_datum.fixture("g2")
    crit = polytope.order_criteria_agree(g2, (1, 1), (1, 1))
    assert tuple(crit) == (True, True, True)


def test_criteria_shallow_containment_refuted():
    # hull containment of low powers without dominance; the escape shows up
    # only at the seventh power
    sl2 = root_datum.fixture("sl2")
    crit = polytope.order_criteria_agree(sl2, (5,), (3,))
    assert tuple(crit) == (False, False, False)
    assert crit.tensor_witness == 7


def test_criteria_records_decompositions():
    sl2 = root_datum.fixture("sl2")
    crit = polytope.order_criteria_agree(sl2, (1,), (3,), n_max=3)
    assert crit.tensor
    assert len(crit.decompositions) == 3


def test_tensor_radius():
    sl2 = root_datum.fixture("sl2")
    assert polytope.tensor_radius_sq(sl2, (3,)) == 144


def test_certificate_support_ball():
    sl2 = root_datum.fixture("sl2")
    support = polytope.certificate_support(sl2, (3,))
    assert support == tuple((k,) for k in range(12, -1, -1))


def same_root_coset(d, mu, lam):
    from semiroot import linalg

    diff = linalg.vec_sub(lam, mu)
    if not d.simple_roots:
        return all(c == 0 for c in diff)
    sol = linalg.solve(linalg.transpose(d.simple_roots), diff)
    return sol is not None and all(c.denominator == 1 for c in sol)


@pytest.mark.parametrize("name,coord_max", [("sl2", 4), ("sl3", 2), ("sp4", 2)])
def test_criteria_match_dominance(name, coord_max):
    d = root_datum.fixture(name)
    box = range(-coord_max, coord_max + 1)
    dominant = [
        v for v in iter_product(box, repeat=d.rank) if root_datum.is_dominant(d, v)
    ]
    for mu in dominant:
        for lam in dominant:
            if not same_root_coset(d, mu, lam):
                continue
            crit = polytope.order_criteria_agree(d, mu, lam)
            truth = root_datum.dominance_leq(d, mu, lam)
            assert crit.dominance == truth
            assert crit.hull == truth
            assert crit.tensor == truth


def test_cover_interval():
    rep = polytope.quantized_cover_check([(-1,), (1,)], 5)
    assert rep.ok
    assert rep.radius_sq == 16
    assert rep.points_checked == 11


def test_cover_singleton():
    rep = polytope.quantized_cover_check([(0, 0)], 4)
    assert rep.ok
    assert rep.radius_sq == 0


def test_cover_sl3_adjoint_orbit():
    sl3 = root_datum.fixture("sl3")
    rep = polytope.quantized_cover_check(root_datum.orbit(sl3, (1, 1)), 3)
    assert rep.ok
    assert rep.points_checked == 91


def test_cover_budget_skip():
    sl3 = root_datum.fixture("sl3")
    rep = polytope.quantized_cover_check(
        root_datum.orbit(sl3, (1, 1)), 3, point_budget=10
    )
    assert rep.verdict == "skipped"
    assert not rep.ok


points2 = st.lists(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=7
)


@given(points2)
@settings(max_examples=40)
def test_hull_facets_contain_generating_points(pts):
    facets = polytope._facets_of(pts)
    for a, b in facets:
        for p in pts:
            assert polytope.dot_f(a, p) <= b


@given(points2, st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=40)
def test_hull_contains_convex_combination(pts, i, j):
    p = pts[i % len(pts)]
    q = pts[j % len(pts)]
    mid = (Fraction(p[0] + q[0], 2), Fraction(p[1] + q[1], 2))
    assert polytope._in_hull_caratheodory(mid, pts)
