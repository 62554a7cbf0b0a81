import random
from fractions import Fraction

import pytest

from padicdendro import (
    BranchingError,
    DuplicatePointError,
    FieldSpec,
    INF,
    InputError,
    PadicNumber,
    ProjPoint,
    ValuationMatrix,
    build_projective_dendrogram,
    canonical_form,
    labeled_isomorphic,
    order,
    single_linkage_oracle,
    stabilize,
    valuation_matrix,
    vertex_of_triple,
)
from padicdendro.builder import check_branching, tree_from_matrix
from padicdendro.tree import MarkedTree
from conftest import F4, Q2, Q3, fpt, inf, ipt, random_distinct_points, random_mobius

FIG1_VALUES = [0, 64, 32, 4, 20, 12, 1, 3]
FIG1_LABELS = [f"x{i + 1}" for i in range(8)]
FIG1_CANON = "(1(x7,x8),2(1(1(x4,x5),x6),3(1(x1,x2),x3)),inf)"


def fig1_points(with_infinity=True):
    points = [ipt(Q2, v) for v in FIG1_VALUES]
    labels = list(FIG1_LABELS)
    if with_infinity:
        points.append(inf())
        labels.append("inf")
    return points, labels


def test_valuation_matrix_figure_values():
    points, labels = fig1_points()
    w = valuation_matrix(points, labels)
    idx = {label: i for i, label in enumerate(w.labels)}
    assert w.entries[idx["x4"]][idx["x5"]] == 4
    assert w.entries[idx["x4"]][idx["x6"]] == 3
    assert w.entries[idx["x7"]][idx["x8"]] == 1
    assert w.entries[idx["x1"]][idx["x2"]] == 6
    assert w.entries[idx["x1"]][idx["x3"]] == 5
    assert w.entries[idx["x1"]][idx["x7"]] == 0
    assert w.entries[idx["x1"]][idx["x4"]] == 2
    assert w.entries[0][0] == INF
    assert w.infinity_index == idx["inf"]


def test_valuation_matrix_two_points():
    w = valuation_matrix([ipt(Q2, 0), ipt(Q2, 1)])
    assert w.entries[0][1] == 0


def test_valuation_matrix_infinity_convention():
    w = valuation_matrix([ipt(Q2, 0), ipt(Q2, 2), inf()])
    assert w.entries[0][1] == 1
    assert w.entries[0][2] == 0 and w.entries[1][2] == 0
    assert w.infinity_index == 2
    # a point outside the unit disk joins the infinity chain below level 0
    w2 = valuation_matrix([ipt(Q2, 0), fpt(Q2, 1, 2), inf()])
    assert w2.entries[1][2] == -1


def test_valuation_matrix_duplicates_routed():
    with pytest.raises(DuplicatePointError) as err:
        valuation_matrix([ipt(Q2, 1), ipt(Q2, 1), inf()])
    assert err.value.groups
    with pytest.raises(DuplicatePointError):
        valuation_matrix([inf(), inf(), ipt(Q2, 0)])


def test_valuation_matrix_is_ultrametric_random():
    rng = random.Random(61)
    for field in (Q2, Q3, F4):
        for _ in range(25):
            pts = random_distinct_points(rng, field, rng.randint(3, 10))
            assert valuation_matrix(pts).is_ultrametric()


def test_vertex_of_triple_unit_disk():
    v = vertex_of_triple(ipt(Q2, 0), ipt(Q2, 1), inf())
    assert v.level == 0 and v.is_unit_disk


def test_vertex_of_triple_with_infinity():
    v = vertex_of_triple(ipt(Q2, 0), ipt(Q2, 2), inf())
    assert v.level == 1
    assert v.center.finite().is_zero()


def test_vertex_of_triple_closest_pair_rule():
    # the branch vertex of three points is the merge disk of the closest
    # pair: for pairwise valuations (4, 3, 3) it sits at level 4
    v = vertex_of_triple(ipt(Q2, 4), ipt(Q2, 20), ipt(Q2, 12))
    assert v.level == 4
    assert not v.center.is_infinity
    # and the center belongs to the closest pair
    assert v.center.finite().equals(PadicNumber.from_int(Q2, 4))


def test_vertex_of_triple_rejects_coincidence():
    with pytest.raises(DuplicatePointError):
        vertex_of_triple(ipt(Q2, 1), ipt(Q2, 1), inf())
    with pytest.raises(InputError):
        vertex_of_triple(inf(), ipt(Q2, 1), inf())


def test_build_tripod():
    t = build_projective_dendrogram([ipt(Q2, 0), ipt(Q2, 1), inf()])
    assert len(t.vertices) == 1 and len(t.ends) == 3
    assert t.root is not None and t.infinity_label == "inf"


def test_build_four_point_second_stratum():
    t = build_projective_dendrogram([ipt(Q2, 0), ipt(Q2, 1), inf(), ipt(Q2, 4)])
    assert t.edges()[0][2] == 2
    root = t.root
    assert sorted(t.ends_at(root)) == ["inf", "x2"]
    inner = next(v for v in t.vertices if v != root)
    assert sorted(t.ends_at(inner)) == ["x1", "x4"]
    assert t.levels[root] == 0 and t.levels[inner] == 2


def test_build_figure_tree():
    points, labels = fig1_points()
    t = build_projective_dendrogram(points, labels)
    assert canonical_form(t) == FIG1_CANON
    levels = sorted(t.levels.values())
    assert levels == [0, 1, 2, 3, 4, 5, 6]
    assert len(t.ends) == 9


def test_build_negative_valuations_shift_infinity_attachment():
    t = build_projective_dendrogram(
        [ipt(Q2, 0), ipt(Q2, 1), inf(), fpt(Q2, 1, 2)]
    )
    attach = t.ends["inf"]
    assert t.levels[attach] == -1
    assert sorted(t.ends_at(attach)) == ["inf", "x4"]
    assert t.levels[t.root] == 0
    assert sorted(t.ends_at(t.root)) == ["x1", "x2"]


def test_build_degenerate_sizes():
    single = build_projective_dendrogram([ipt(Q2, 5)])
    assert len(single.vertices) == 1 and list(single.ends) == ["x1"]
    pair = build_projective_dendrogram([ipt(Q2, 0), ipt(Q2, 4)], normalize=False)
    assert len(pair.vertices) == 1 and sorted(pair.ends) == ["x1", "x2"]
    assert pair.levels[pair.vertices[0]] == 2  # recorded separation
    geodesic = build_projective_dendrogram([ipt(Q2, 3), inf()], normalize=False)
    assert sorted(geodesic.ends) == ["inf", "x1"]


def test_build_default_normalization_transforms_first_three():
    raw = [ipt(Q2, 2), ipt(Q2, 3), ipt(Q2, 4), ipt(Q2, 6)]
    labels = ["x1", "x2", "x3", "x4"]
    t = build_projective_dendrogram(raw, labels)
    expected = build_projective_dendrogram(
        [ipt(Q2, 0), ipt(Q2, 1), inf(), ipt(Q2, -2)], labels, normalize=False
    )
    assert labeled_isomorphic(t, expected)
    assert t.root is not None


def test_build_non_normalized_mode_has_no_root():
    t = build_projective_dendrogram(
        [ipt(Q2, 2), ipt(Q2, 3), ipt(Q2, 4), ipt(Q2, 6)], normalize=False
    )
    assert t.root is None
    assert sorted(t.ends) == ["x1", "x2", "x3", "x4"]


def test_end_bijection_and_regularity():
    rng = random.Random(67)
    for field in (Q2, F4):
        for _ in range(40):
            pts = random_distinct_points(rng, field, rng.randint(3, 12))
            t = build_projective_dendrogram(pts, normalize=False)
            assert len(t.ends) == len(pts)
            for v in t.vertices:
                assert order(t, v) <= field.q + 1


def test_oracle_equivalence_random():
    rng = random.Random(71)
    for field in (Q2, Q3, F4):
        for _ in range(60):
            pts = random_distinct_points(rng, field, rng.randint(3, 20))
            w = valuation_matrix(pts)
            built = build_projective_dendrogram(pts, normalize=False)
            oracle = single_linkage_oracle(w)
            assert labeled_isomorphic(built, oracle)


def test_oracle_figure_tree():
    points, labels = fig1_points()
    w = valuation_matrix(points, labels)
    assert canonical_form(single_linkage_oracle(w)) == FIG1_CANON


def test_oracle_star_when_all_zero():
    w = ValuationMatrix(("a", "b", "c"), ((INF, 0, 0), (0, INF, 0), (0, 0, INF)))
    t = single_linkage_oracle(w)
    assert len(t.vertices) == 1 and len(t.ends) == 3


def test_oracle_single_merge():
    w = ValuationMatrix(
        ("a", "b", "c"), ((INF, 5, 0), (5, INF, 0), (0, 0, INF))
    )
    t = single_linkage_oracle(w)
    # without an infinity row the top vertex is unstable; one vertex remains
    assert len(t.vertices) == 1
    assert t.levels[t.vertices[0]] == 5


def test_oracle_rejects_non_ultrametric():
    w = ValuationMatrix(
        ("a", "b", "c"), ((INF, 5, 0), (5, INF, 1), (0, 1, INF))
    )
    with pytest.raises(InputError):
        single_linkage_oracle(w)


def test_projective_invariance_of_trees():
    rng = random.Random(73)
    for field in (Q2, F4):
        for _ in range(50):
            pts = random_distinct_points(rng, field, rng.randint(3, 10))
            labels = [f"p{i}" for i in range(len(pts))]
            g = random_mobius(rng, field)
            moved = [g.apply(p) for p in pts]
            t1 = build_projective_dendrogram(pts, labels, normalize=False)
            t2 = build_projective_dendrogram(moved, labels, normalize=False)
            assert labeled_isomorphic(t1, t2)


def test_branching_check_names_sufficient_degree():
    w = ValuationMatrix(
        ("a", "b", "c", "inf"),
        (
            (INF, 0, 0, 0),
            (0, INF, 0, 0),
            (0, 0, INF, 0),
            (0, 0, 0, INF),
        ),
        infinity_index=3,
    )
    t = tree_from_matrix(w)
    with pytest.raises(BranchingError) as err:
        check_branching(t, Q2)
    assert err.value.suggested_m == 2
    check_branching(t, F4)  # q = 4 fits three children


def test_stabilized_subdivision_recovers_builder_tree():
    # subdividing every edge into unit steps gives the raw disk-chain tree;
    # stabilizing it must recover the builder output exactly
    points, labels = fig1_points()
    t = build_projective_dendrogram(points, labels)
    vertices = list(t.vertices)
    edges = []
    ends = dict(t.ends)
    counter = 0
    for u, v, length in t.edges():
        prev = u
        for step in range(1, length):
            mid = f"chain{counter}"
            counter += 1
            vertices.append(mid)
            edges.append((prev, mid, 1))
            prev = mid
        edges.append((prev, v, 1))
    raw = MarkedTree(vertices, edges, ends, infinity_label="inf")
    st = stabilize(raw)
    assert labeled_isomorphic(st, t)
    assert st.total_length() == t.total_length()


def test_builder_rejects_empty_and_mismatched():
    with pytest.raises(InputError):
        build_projective_dendrogram([])
    with pytest.raises(InputError):
        build_projective_dendrogram([ipt(Q2, 0), ipt(Q3, 1)])
    with pytest.raises(InputError):
        build_projective_dendrogram([ipt(Q2, 0), ipt(Q2, 1)], labels=["a", "a"])
