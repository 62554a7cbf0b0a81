import warnings

import pytest

from padicdendro import (
    InputError,
    MarkedTree,
    build_projective_dendrogram,
    canonical_form,
    check_bounds,
    enumerate_labeled,
    enumerate_shapes,
    extremal_dendrogram,
    hidden_report,
    hidden_subgraph,
    order,
)
from conftest import Q2, inf, ipt, labeled_unrooted_tree_count


def spider6() -> MarkedTree:
    return MarkedTree(
        ["c", "a", "b", "d"],
        [("c", "a", 1), ("c", "b", 1), ("c", "d", 1)],
        {"1": "a", "2": "a", "3": "b", "4": "b", "5": "d", "6": "d"},
    )


def fig1_tree() -> MarkedTree:
    values = [0, 64, 32, 4, 20, 12, 1, 3]
    points = [ipt(Q2, v) for v in values] + [inf()]
    labels = [f"x{i + 1}" for i in range(8)] + ["inf"]
    return build_projective_dendrogram(points, labels)


def test_hidden_subgraph_tripod_empty():
    tripod = MarkedTree(["c"], [], {"0": "c", "1": "c", "inf": "c"})
    vertices, edges = hidden_subgraph(tripod)
    assert vertices == set() and edges == set()


def test_hidden_subgraph_spider_center():
    vertices, edges = hidden_subgraph(spider6())
    assert vertices == {"c"} and edges == set()


def test_hidden_subgraph_figure_tree():
    t = fig1_tree()
    vertices, edges = hidden_subgraph(t)
    assert len(vertices) == 1 and not edges
    (v,) = vertices
    assert t.levels[v] == 2  # the six-point cluster vertex
    assert len(t.neighbors(v)) == 3 and not t.ends_at(v)


def test_spider_report():
    r = hidden_report(spider6())
    assert (r.n, r.v_h, r.t_h, r.b0_h, r.chi) == (6, 1, 0, 1, 1)
    assert r.all_bounds_hold
    # the component bound is attained with equality at n = 6
    assert check_bounds(6, 1, 1) == (True, True, True)


def test_figure_tree_report():
    r = hidden_report(fig1_tree())
    assert (r.n, r.v_h, r.b0_h) == (9, 1, 1)
    assert r.all_bounds_hold


def test_tripod_report():
    tripod = MarkedTree(["c"], [], {"0": "c", "1": "c", "inf": "c"})
    r = hidden_report(tripod)
    assert (r.v_h, r.t_h, r.b0_h, r.chi) == (0, 0, 0, 0)
    assert r.all_bounds_hold


def test_classical_variant_flag():
    r = hidden_report(fig1_tree(), on_classical_view=True)
    assert r.n == 8
    # removing the infinity halfline strips the root's only end, so the
    # root itself becomes hidden alongside the six-point cluster vertex
    assert r.v_h == 2 and r.b0_h == 1


def test_adjacent_hidden_pair_attains_vertex_bound():
    t = MarkedTree(
        ["h1", "h2", "a", "b", "c", "d"],
        [
            ("h1", "h2", 1),
            ("h1", "a", 1),
            ("h1", "b", 1),
            ("h2", "c", 1),
            ("h2", "d", 1),
        ],
        {str(k): v for k, v in enumerate(["a", "a", "b", "b", "c", "c", "d", "d"])},
    )
    r = hidden_report(t)
    assert (r.n, r.v_h, r.t_h, r.b0_h) == (8, 2, 2, 1)
    assert r.all_bounds_hold


def test_two_block_chain_refutes_the_two_coarse_bounds():
    # the sharp-bound witness at n = 9: a legitimate dendrogram shape whose
    # existence contradicts the two non-sharp inequalities
    t9 = extremal_dendrogram(9)
    r = hidden_report(t9)
    assert (r.n, r.v_h, r.b0_h) == (9, 2, 2)
    assert not r.vertex_bound
    assert not r.component_bound
    assert r.sharp_bound


def test_three_hidden_path_refutes_vertex_bound():
    t = MarkedTree(
        ["h1", "h2", "h3", "a", "b", "u", "c", "d"],
        [
            ("h1", "h2", 1),
            ("h2", "h3", 1),
            ("h1", "a", 1),
            ("h1", "b", 1),
            ("h2", "u", 1),
            ("h3", "c", 1),
            ("h3", "d", 1),
        ],
        {
            str(k): v
            for k, v in enumerate(
                ["a", "a", "b", "b", "u", "u", "c", "c", "d", "d"]
            )
        },
    )
    r = hidden_report(t)
    assert (r.n, r.v_h, r.t_h, r.b0_h) == (10, 3, 2, 1)
    assert not r.vertex_bound  # 3 > 10/4 - 1 + 1
    assert r.component_bound and r.sharp_bound


def test_extremal_witnesses_attain_sharp_bound():
    for n in range(6, 31):
        t = extremal_dendrogram(n)
        r = hidden_report(t)
        assert r.b0_h == (n - 3) // 3
        assert r.sharp_bound
        for v in t.vertices:
            assert order(t, v) >= 3


def test_extremal_small_n_star_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = extremal_dendrogram(4)
    assert len(caught) == 1
    assert hidden_report(t).b0_h == 0
    with pytest.raises(InputError):
        extremal_dendrogram(2)


def test_shape_counts():
    assert [len(enumerate_shapes(n)) for n in range(3, 7)] == [1, 2, 3, 7]


def test_labeled_counts_match_partition_recurrence():
    for n in range(4, 8):
        assert len(enumerate_labeled(n)) == labeled_unrooted_tree_count(n)
    assert labeled_unrooted_tree_count(5) == 26
    assert labeled_unrooted_tree_count(6) == 236
    assert labeled_unrooted_tree_count(7) == 2752


def test_labeled_five_end_breakdown():
    # 1 star + 10 one-edge + 15 binary trees
    trees = enumerate_labeled(5)
    by_vertex_count = {}
    for t in trees:
        by_vertex_count.setdefault(len(t.vertices), 0)
        by_vertex_count[len(t.vertices)] += 1
    assert by_vertex_count == {1: 1, 2: 10, 3: 15}


def test_enumeration_caps():
    with pytest.raises(InputError):
        enumerate_shapes(11)
    with pytest.raises(InputError):
        enumerate_shapes(2)
    with pytest.raises(InputError):
        enumerate_labeled(8)
    assert len(enumerate_shapes(11, cap=11)) > len(enumerate_shapes(10))


def test_enumeration_is_deterministic():
    first = [canonical_form(t, labeled=False, lengths=False) for t in enumerate_shapes(7)]
    second = [canonical_form(t, labeled=False, lengths=False) for t in enumerate_shapes(7)]
    assert first == second == sorted(first)


def test_enumerated_shapes_are_valid_and_unique():
    for n in range(3, 9):
        shapes = enumerate_shapes(n)
        forms = set()
        for t in shapes:
            assert len(t.ends) == n
            for v in t.vertices:
                assert order(t, v) >= 3
            forms.add(canonical_form(t, labeled=False, lengths=False))
        assert len(forms) == len(shapes)


def test_internal_vertex_bound_over_shapes():
    for n in range(3, 9):
        for t in enumerate_shapes(n):
            assert len(t.vertices) <= len(t.ends) - 2


def test_bounds_clean_through_eight_ends():
    for n in range(3, 9):
        for t in enumerate_shapes(n):
            r = hidden_report(t)
            assert r.all_bounds_hold, canonical_form(t, labeled=False, lengths=False)


def test_sharp_bound_clean_through_ten_ends():
    for n in range(3, 11):
        for t in enumerate_shapes(n):
            assert hidden_report(t).sharp_bound


def test_connected_case_inequalities_over_shapes():
    for n in range(3, 10):
        for t in enumerate_shapes(n):
            r = hidden_report(t)
            vertices, edges = hidden_subgraph(t)
            if r.b0_h == 1 and edges:
                assert 4 * r.t_h <= r.n
            if r.b0_h == 1 and not edges:
                assert r.v_h == 1
                assert r.n >= 6
            assert r.chi == r.b0_h  # the hidden subgraph is a forest
            # hidden vertices carry no ends; all other vertices carry some
            for v in t.vertices:
                if v in vertices:
                    assert not t.ends_at(v)
                else:
                    assert t.ends_at(v)
