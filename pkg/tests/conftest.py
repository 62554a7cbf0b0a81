"""Shared helpers: field constants, random generators, brute-force oracles."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

import pytest

from padicdendro import (
    FieldSpec,
    MarkedTree,
    Mobius,
    PadicNumber,
    ProjPoint,
)

Q2 = FieldSpec(2)
Q3 = FieldSpec(3)
F4 = FieldSpec(2, 2)
F8 = FieldSpec(2, 3)


@pytest.fixture
def q2():
    return Q2


def ipt(field: FieldSpec, n: int) -> ProjPoint:
    return ProjPoint.from_int(field, n)


def fpt(field: FieldSpec, num: int, den: int) -> ProjPoint:
    return ProjPoint.from_fraction(field, Fraction(num, den))


def inf() -> ProjPoint:
    return ProjPoint.infinity()


def random_exact_number(rng: random.Random, field: FieldSpec, max_digits=6) -> PadicNumber:
    v0 = rng.randint(-3, 5)
    k = rng.randint(1, max_digits)
    digits = [rng.randrange(field.q) for _ in range(k)]
    digits[0] = rng.randrange(1, field.q)
    return PadicNumber(field, digits, v0=v0)


def random_distinct_points(
    rng: random.Random, field: FieldSpec, n: int, allow_infinity=True
) -> list[ProjPoint]:
    points: list[ProjPoint] = []
    if allow_infinity and rng.random() < 0.5:
        points.append(inf())
    while len(points) < n:
        cand = ProjPoint.of(random_exact_number(rng, field))
        if all(not cand.equals(p) for p in points):
            points.append(cand)
    rng.shuffle(points)
    return points


def random_mobius(rng: random.Random, field: FieldSpec) -> Mobius:
    while True:
        a, b, c, d = (rng.randint(-9, 9) for _ in range(4))
        if a * d - b * c != 0:
            return Mobius.from_ints(field, a, b, c, d)


def random_marked_tree(rng: random.Random, n_ends: int, max_len=3) -> MarkedTree:
    """Random tree with random end attachments; not necessarily stable."""
    n_vertices = rng.randint(1, max(1, n_ends - 1))
    vertices = [f"n{i}" for i in range(n_vertices)]
    edges = []
    for i in range(1, n_vertices):
        parent = rng.randrange(i)
        edges.append((vertices[parent], vertices[i], rng.randint(1, max_len)))
    ends = {}
    for k in range(n_ends):
        ends[f"L{k}"] = vertices[rng.randrange(n_vertices)]
    return MarkedTree(vertices, edges, ends)


def brute_force_labeled_isomorphic(t1: MarkedTree, t2: MarkedTree) -> bool:
    """Ground-truth isomorphism by exhausting vertex bijections."""
    if sorted(t1.ends) != sorted(t2.ends):
        return False
    v1, v2 = t1.vertices, t2.vertices
    if len(v1) != len(v2) or len(t1.edges()) != len(t2.edges()):
        return False
    adj1 = {u: t1.neighbors(u) for u in v1}
    adj2 = {u: t2.neighbors(u) for u in v2}
    for perm in permutations(v2):
        mapping = dict(zip(v1, perm))
        if any(t2.ends[l] != mapping[t1.ends[l]] for l in t1.ends):
            continue
        ok = True
        for u in v1:
            image = {mapping[w]: length for w, length in adj1[u].items()}
            if image != adj2[mapping[u]]:
                ok = False
                break
        if ok:
            return True
    return False


def labeled_rooted_tree_count(k: int) -> int:
    """Rooted trees with k labeled leaves, every internal vertex >= 2 children.

    Computed by the first-element-block recurrence: W(0) = 1, W(j) counts
    block-partitions of j leaves weighted by the count of each block's tree,
    and a tree on k >= 2 leaves is a root over >= 2 blocks.
    """
    from math import comb

    R = {1: 1}
    W = {0: 1, 1: 1}
    for k_ in range(2, k + 1):
        acc = 0
        for s in range(1, k_):
            acc += comb(k_ - 1, s - 1) * R[s] * W[k_ - s]
        R[k_] = acc
        W[k_] = 2 * acc
    return R[k]


def labeled_unrooted_tree_count(n: int) -> int:
    """Unrooted trees with n labeled ends, internal vertices of order >= 3."""
    if n < 3:
        raise ValueError("need n >= 3")
    return labeled_rooted_tree_count(n - 1)
