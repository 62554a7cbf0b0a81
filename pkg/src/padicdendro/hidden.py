"""Hidden part of a dendrogram and its topology.

A vertex is hidden when no end attaches to it, i.e. its star inside the
finite part already is its whole star.  This module computes the subgraph
spanned by hidden vertices, its component/tip/Euler statistics, verifies
the three inequalities bounding that topology in terms of the number of
ends, constructs extremal witnesses, and exhaustively enumerates small
dendrogram shapes as an independent check.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import InputError
from .tree import MarkedTree, canonical_form, classical_view

DEFAULT_ENUMERATION_CAP = 10
LABELED_ENUMERATION_CAP = 7


def hidden_subgraph(tree: MarkedTree):
    """Vertices without attached ends, and the edges joining two of them."""
    vertices = {v for v in tree.vertices if not tree.ends_at(v)}
    edges = {
        (u, v)
        for u, v, _ in tree.edges()
        if u in vertices and v in vertices
    }
    return vertices, edges


@dataclass(frozen=True)
class HiddenReport:
    """Topology of the hidden subgraph of an n-end dendrogram."""

    n: int
    v_h: int
    t_h: int
    b0_h: int
    chi: int
    vertex_bound: bool
    component_bound: bool
    sharp_bound: bool

    @property
    def all_bounds_hold(self) -> bool:
        return self.vertex_bound and self.component_bound and self.sharp_bound

    def summary(self) -> str:
        flags = "".join(
            "+" if ok else "-"
            for ok in (self.vertex_bound, self.component_bound, self.sharp_bound)
        )
        return (
            f"n={self.n} v_h={self.v_h} t_h={self.t_h} b0_h={self.b0_h} "
            f"chi={self.chi} bounds={flags}"
        )

    def to_json(self) -> str:
        doc = {
            "format_version": 1,
            "type": "hidden_report",
            "n": self.n,
            "v_h": self.v_h,
            "t_h": self.t_h,
            "b0_h": self.b0_h,
            "chi": self.chi,
            "bounds": {
                "vertex_bound": self.vertex_bound,
                "component_bound": self.component_bound,
                "sharp_bound": self.sharp_bound,
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def check_bounds(n: int, v_h: int, b0_h: int) -> tuple[bool, bool, bool]:
    """The three inequalities, evaluated in exact rational arithmetic:

    v_h <= n/4 - b0_h + 1;  b0_h <= (n+4)/8;  b0_h <= (n-3)/3.
    """
    vertex = Fraction(v_h) <= Fraction(n, 4) - b0_h + 1
    component = Fraction(b0_h) <= Fraction(n + 4, 8)
    sharp = Fraction(b0_h) <= Fraction(n - 3, 3)
    return vertex, component, sharp


def hidden_report(tree: MarkedTree, on_classical_view: bool = False) -> HiddenReport:
    """Compute the hidden-subgraph statistics of a stabilized dendrogram.

    By default the projective tree is analyzed (the infinity end counts as
    an end and contributes to n).  ``on_classical_view`` first removes the
    infinity halfline and analyzes the remaining classical dendrogram; that
    variant is offered for exploration only.
    """
    if on_classical_view:
        tree = classical_view(tree)
    vertices, edges = hidden_subgraph(tree)
    n = len(tree.ends)
    v_h = len(vertices)
    e_h = len(edges)
    # components by union-find over hidden edges
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    b0_h = len({find(v) for v in vertices})
    chi = v_h - e_h
    degree = {v: 0 for v in vertices}
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    t_h = sum(1 for v in vertices if degree[v] == 1)
    vertex_ok, component_ok, sharp_ok = check_bounds(n, v_h, b0_h)
    return HiddenReport(n, v_h, t_h, b0_h, chi, vertex_ok, component_ok, sharp_ok)


def extremal_dendrogram(n: int) -> MarkedTree:
    """An n-end dendrogram attaining b0_h = floor((n-3)/3).

    Built by chaining six-end blocks (a hidden center with three two-end
    arms) through shared one-end arm vertices; each additional block costs
    three ends.  Leftover ends (n mod 3) go onto the last block.  For
    n < 6 no hidden vertex is possible, so the n-star (b0_h = 0) is
    returned with a warning.
    """
    if n < 3:
        raise InputError("a dendrogram needs at least 3 ends")
    labels = iter(f"e{i + 1}" for i in range(n))
    if n < 6:
        ends = {next(labels): "c" for _ in range(n)}
        warnings.warn(
            f"n={n} < 6 admits no hidden vertex; returning the {n}-star",
            stacklevel=2,
        )
        return MarkedTree(["c"], [], ends)
    blocks = (n - 3) // 3
    leftover = n - (3 * blocks + 3)
    vertices: list[str] = []
    edges: list[tuple[str, str, int]] = []
    ends: dict[str, str] = {}

    def arm(center, name, end_count):
        vertices.append(name)
        edges.append((center, name, 1))
        for _ in range(end_count):
            ends[next(labels)] = name

    if blocks == 1:
        vertices.append("c1")
        arm("c1", "a1", 2)
        arm("c1", "b1", 2)
        arm("c1", "d1", 2 + leftover)
    else:
        for k in range(1, blocks + 1):
            vertices.append(f"c{k}")
        arm("c1", "a1", 2)
        arm("c1", "b1", 2)
        for k in range(1, blocks):
            # shared arm between consecutive hidden centers, one end on it
            name = f"w{k}"
            vertices.append(name)
            edges.append((f"c{k}", name, 1))
            edges.append((name, f"c{k + 1}", 1))
            ends[next(labels)] = name
        for k in range(2, blocks):
            arm(f"c{k}", f"p{k}", 2)
        arm(f"c{blocks}", f"a{blocks}", 2)
        arm(f"c{blocks}", f"b{blocks}", 2 + leftover)
    return MarkedTree(vertices, edges, ends)


def enumerate_shapes(n: int, cap: int = DEFAULT_ENUMERATION_CAP):
    """All unlabeled dendrogram shapes with n ends, each exactly once.

    Shapes are trees whose internal vertices all have order >= 3 counting
    ends.  Generated by growing one end at a time from the tripod and
    deduplicating canonical forms; shape counts grow super-exponentially,
    hence the configurable cap.
    """
    if n < 3:
        raise InputError("shapes need at least 3 ends")
    if n > cap:
        raise InputError(
            f"n={n} exceeds the enumeration cap {cap}; raise the cap knowingly"
        )
    current = {_shape_key(_tripod()): _tripod()}
    for _ in range(n - 3):
        grown: dict[str, MarkedTree] = {}
        for tree in current.values():
            for candidate in _grow_by_one_end(tree):
                key = _shape_key(candidate)
                if key not in grown:
                    grown[key] = candidate
        current = grown
    return [current[key] for key in sorted(current)]


def _tripod() -> MarkedTree:
    return MarkedTree(["v0"], [], {"0": "v0", "1": "v0", "2": "v0"})


def _shape_key(tree: MarkedTree) -> str:
    return canonical_form(tree, labeled=False, lengths=False)


def _grow_by_one_end(tree: MarkedTree):
    """Every shape with one more end whose removal would yield ``tree``."""
    new_label = str(len(tree.ends))
    # attach the new end to an existing vertex
    for v in tree.vertices:
        ends = dict(tree.ends)
        ends[new_label] = v
        yield MarkedTree(tree.vertices, tree.edges(), ends)
    # subdivide an edge with a new order-3 vertex carrying the new end
    for u, v, _ in tree.edges():
        mid = _fresh_vertex(tree)
        edges = [e for e in tree.edges() if (e[0], e[1]) != (u, v)]
        edges += [(u, mid, 1), (mid, v, 1)]
        ends = dict(tree.ends)
        ends[new_label] = mid
        yield MarkedTree(list(tree.vertices) + [mid], edges, ends)
    # split an end off to a new vertex, paired with the new end
    for label, v in tree.ends.items():
        mid = _fresh_vertex(tree)
        edges = tree.edges() + [(v, mid, 1)]
        ends = dict(tree.ends)
        ends[label] = mid
        ends[new_label] = mid
        yield MarkedTree(list(tree.vertices) + [mid], edges, ends)


def _fresh_vertex(tree: MarkedTree) -> str:
    k = len(tree.vertices)
    while f"v{k}" in set(tree.vertices):
        k += 1
    return f"v{k}"


def enumerate_labeled(n: int, cap: int = LABELED_ENUMERATION_CAP):
    """All end-labeled dendrograms with n ends (labels '1'..'n'), each once.

    Realized by relabeling every shape in all n! ways and deduplicating;
    intended for small n, hence the tighter cap.
    """
    if n > cap:
        raise InputError(
            f"labeled enumeration of n={n} exceeds the cap {cap}"
        )
    labels = [str(i + 1) for i in range(n)]
    out: dict[str, MarkedTree] = {}
    for shape in enumerate_shapes(n, cap=max(cap, DEFAULT_ENUMERATION_CAP)):
        slots = sorted(shape.ends)
        for perm in permutations(labels):
            ends = {perm[i]: shape.ends[slot] for i, slot in enumerate(slots)}
            candidate = MarkedTree(shape.vertices, shape.edges(), ends)
            key = canonical_form(candidate, labeled=True, lengths=False)
            if key not in out:
                out[key] = candidate
    return [out[key] for key in sorted(out)]
