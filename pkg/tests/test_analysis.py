"""Hyperbolicity constants, convexity scans, quasigeodesic and QI fits."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from horolab import InputError, Path, cayley_ball, free_abelian
from horolab.analysis import (
    InteriorFilter,
    convexity_defect,
    displacement_generating_set,
    four_point_delta,
    is_r_local_geodesic,
    qi_distortion,
    quasigeodesic_fit,
)
from horolab.graph import (
    binary_tree,
    cycle_graph,
    enumerate_geodesics,
    grid_graph,
    path_graph,
    random_connected_graph,
    star_graph,
)
from horolab.horoball import build_restricted_horoball

from oracles import floyd_warshall, naive_four_point_delta


# -- four point delta ------------------------------------------------------------


@pytest.mark.parametrize("tree", [path_graph(6), star_graph(5), binary_tree(3)])
def test_trees_are_zero_hyperbolic(tree):
    est = four_point_delta(tree)
    assert est.delta == 0 and est.exhaustive


def test_single_edge_zero():
    est = four_point_delta(path_graph(1))
    assert est.delta == 0 and est.quadruples_checked == 0 and est.exhaustive


def test_c12_matches_naive_quadruple_scan():
    g = cycle_graph(12)
    est = four_point_delta(g)
    fw = floyd_warshall(12, [tuple(e) for e in g.edges])
    assert est.delta == naive_four_point_delta(fw)
    assert est.exhaustive


def test_exhaustive_matches_naive_on_random_instances():
    rng = random.Random(123)
    for _ in range(8):
        g = random_connected_graph(rng.randrange(4, 12), rng.randrange(0, 6), rng)
        est = four_point_delta(g)
        fw = floyd_warshall(g.num_vertices, [tuple(e) for e in g.edges])
        assert est.delta == naive_four_point_delta(fw)


def test_sampled_mode_flags_and_reproducibility():
    g = cycle_graph(30)
    a = four_point_delta(g, sample=500, seed=4)
    b = four_point_delta(g, sample=500, seed=4)
    exact = four_point_delta(g)
    assert not a.exhaustive and a.quadruples_checked == 500
    assert a.delta == b.delta
    assert a.delta <= exact.delta
    with pytest.raises(InputError):
        four_point_delta(g, sample=0)


# -- convexity ----------------------------------------------------------------------


def test_subtree_of_tree_is_convex():
    g = binary_tree(3)
    report = convexity_defect(g, [0, 1, 3, 4])
    assert report.convex and report.quasiconvexity_constant == 0 and not report.witnesses


def test_c4_arc_has_the_expected_witness():
    report = convexity_defect(cycle_graph(4), [0, 1, 2])
    assert report.defect > 0
    assert (0, 2, 3) in report.witnesses


def test_top_level_of_small_horoball_is_convex():
    h = build_restricted_horoball(path_graph(16), 3)
    report = convexity_defect(h.carrier, list(h.level_vertices(3)))
    assert report.convex


def test_deep_sets_are_convex_in_horoball():
    h = build_restricted_horoball(path_graph(12), 3)
    for k in range(h.depth + 1):
        report = convexity_defect(h.carrier, h.deep_vertices(k), geodesic_cap=0)
        assert report.convex, f"levels >= {k}"


def test_betweenness_agrees_with_geodesic_enumeration():
    rng = random.Random(77)
    for _ in range(12):
        g = random_connected_graph(rng.randrange(4, 14), rng.randrange(0, 8), rng)
        n = g.num_vertices
        size = rng.randrange(2, n)
        s = sorted(rng.sample(range(n), size))
        report = convexity_defect(g, s)
        s_set = set(s)
        leaves = False
        for i in range(len(s)):
            for j in range(i + 1, len(s)):
                paths, _ = enumerate_geodesics(g, s[i], s[j], cap=100_000)
                if any(set(p.vertices) - s_set for p in paths):
                    leaves = True
        assert report.convex == (not leaves)


def test_pair_filter_restricts_scan():
    g = cycle_graph(12)
    s = [0, 1, 2, 3, 4, 5, 6]
    unfiltered = convexity_defect(g, s)
    filtered = convexity_defect(g, s, pair_filter=InteriorFilter(basepoint=0, radius=3))
    assert filtered.pairs_checked < unfiltered.pairs_checked
    explicit = convexity_defect(g, s, pairs=[(0, 1), (1, 2)])
    assert explicit.pairs_checked == 2 and explicit.convex
    with pytest.raises(InputError):
        convexity_defect(g, s, pairs=[(0, 11)])
    with pytest.raises(InputError):
        convexity_defect(g, [])


def test_quasiconvexity_constant_of_cycle_arc():
    # geodesics from 0 to 4 the short way stay in S; the witness path through
    # 5 strays distance 1 from the arc {0..4} in C_6... use C_8 arc instead
    g = cycle_graph(8)
    s = [0, 1, 2, 3, 4]
    report = convexity_defect(g, s)
    assert report.defect == 2  # vertex 6 sits at distance 2 from the arc
    assert report.quasiconvexity_constant == 2


# -- local geodesics -----------------------------------------------------------------


def test_any_geodesic_is_r_local():
    g = grid_graph(4, 4)
    paths, _ = enumerate_geodesics(g, 0, 15, cap=1)
    for r in (1, 2, 3, 6, 10):
        ok, violation = is_r_local_geodesic(g, paths[0], r)
        assert ok and violation is None


def test_arc_windows_in_c8():
    g = cycle_graph(8)
    arc = Path.in_graph(g, [0, 1, 2, 3, 4, 5])
    ok, violation = is_r_local_geodesic(g, arc, 3)
    assert ok
    ok, violation = is_r_local_geodesic(g, arc, 5)
    assert not ok and violation == (0, 5)
    with pytest.raises(InputError):
        is_r_local_geodesic(g, arc, 0)


# -- quasigeodesic fit -----------------------------------------------------------------


def test_geodesic_fits_with_l_one():
    g = grid_graph(3, 5)
    paths, _ = enumerate_geodesics(g, 0, 14, cap=1)
    assert quasigeodesic_fit(g, paths[0], 0) == 1


def test_arc_in_c8_fit_is_exact_rational():
    g = cycle_graph(8)
    arc = Path.in_graph(g, [0, 1, 2, 3, 4, 5])
    assert quasigeodesic_fit(g, arc, 0) == Fraction(5, 3)


def test_closed_walk_has_no_finite_fit():
    g = cycle_graph(4)
    walk = Path.in_graph(g, [0, 1, 2, 3, 0])
    assert quasigeodesic_fit(g, walk, 0) == math.inf
    assert quasigeodesic_fit(g, walk, 1) == Fraction(4, 1)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), c1=st.integers(0, 3), c2=st.integers(0, 3))
def test_fit_monotone_in_additive_budget(seed, c1, c2):
    rng = random.Random(seed)
    g = random_connected_graph(rng.randrange(3, 10), rng.randrange(0, 5), rng)
    # random walk of moderate length
    vs = [0]
    for _ in range(6):
        vs.append(int(rng.choice(list(g.neighbors(vs[-1])))))
    p = Path(tuple(vs))
    lo, hi = sorted((c1, c2))
    f_hi, f_lo = quasigeodesic_fit(g, p, hi), quasigeodesic_fit(g, p, lo)
    assert f_hi <= f_lo


# -- displacement sets -----------------------------------------------------------------


def z2_orbit(radius):
    ball = cayley_ball(free_abelian(2), radius)
    return [(g, ball.word_lengths[i]) for i, g in enumerate(ball.elements)]


def test_unit_ball_of_z2():
    s1 = displacement_generating_set(z2_orbit(3), 1)
    assert len(s1) == 5  # e, a^+-1, b^+-1


def test_radius_two_ball_of_z2():
    assert len(displacement_generating_set(z2_orbit(3), 2)) == 13


def test_displacement_sets_nest_and_close_under_inverse():
    orbit = z2_orbit(4)
    prev = set()
    for t in (1, 2, 3, 4):
        st_set = set(displacement_generating_set(orbit, t))
        assert prev <= st_set
        assert all(g.inverse() in st_set for g in st_set)
        prev = st_set


def test_error_below_minimal_displacement():
    orbit = [(free_abelian(2).identity(), 0)] + [(g, d + 5) for g, d in z2_orbit(2)[1:]]
    with pytest.raises(InputError, match="does not generate"):
        displacement_generating_set(orbit, 3)


# -- qi distortion -----------------------------------------------------------------------


def test_identity_map_fits_k_one():
    fit = qi_distortion([1, 2, 3, 4], [1, 2, 3, 4], scale=1, additive_budget=0)
    assert fit.multiplicative == 1 and fit.pairs_checked == 4


def test_uniform_scaling_absorbed_by_lambda():
    fit = qi_distortion([1, 2, 3], [3, 6, 9], scale=3, additive_budget=0)
    assert fit.multiplicative == 1


def test_mismatched_zero_is_infinite():
    fit = qi_distortion([0], [5], scale=1, additive_budget=1)
    assert fit.multiplicative == math.inf
    fit = qi_distortion([4], [0], scale=1, additive_budget=0)
    assert fit.multiplicative == math.inf


def test_exact_rational_fit():
    # domain 3 maps to 7 with lam=2: upper side needs K >= (7-1)/6 = 1,
    # lower side K >= 6/(7+1) < 1 -> K = 1;  with C=0: K = 7/6
    assert qi_distortion([3], [7], scale=2, additive_budget=1).multiplicative == 1
    assert qi_distortion([3], [7], scale=2, additive_budget=0).multiplicative == Fraction(7, 6)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 999),
    c1=st.integers(0, 4),
    c2=st.integers(0, 4),
)
def test_qi_fit_monotone_in_budget(seed, c1, c2):
    rng = random.Random(seed)
    dx = [rng.randrange(0, 9) for _ in range(12)]
    dy = [rng.randrange(0, 9) for _ in range(12)]
    lo, hi = sorted((c1, c2))
    f_lo = qi_distortion(dx, dy, scale=1, additive_budget=lo).multiplicative
    f_hi = qi_distortion(dx, dy, scale=1, additive_budget=hi).multiplicative
    assert f_hi <= f_lo


def test_qi_input_validation():
    with pytest.raises(InputError):
        qi_distortion([1], [1], scale=0)
    with pytest.raises(InputError):
        qi_distortion([1, 2], [1], scale=1)
