"""Dendrogram construction from exact pairwise valuations.

The tree of a finite point set is assembled from its valuation matrix: the
merge disks of point pairs are exactly the branch vertices, edges follow
maximal inclusion with lengths equal to valuation gaps, and the infinity
end attaches at the coarsest merge vertex.  A deliberately naive
agglomerative single-linkage routine is provided as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BranchingError,
    DuplicatePointError,
    FieldMismatchError,
    InputError,
)
from .mobius import normalizing_mobius
from .padic import INF, PadicNumber, ProjPoint
from .tree import MarkedTree, stabilize


@dataclass(frozen=True)
class ValuationMatrix:
    """Symmetric matrix of pairwise valuations w(i,j) = val(x_i - x_j).

    The diagonal holds INF.  When one point is infinity, its row and column
    are flagged by ``infinity_index`` and hold the chart-swap convention
    min(val(x_i), 0); those entries describe where the halfline toward
    infinity leaves the chain of unit-disk ancestors and are not merge
    levels, so clustering ignores them.
    """

    labels: tuple[str, ...]
    entries: tuple[tuple[float, ...], ...]
    infinity_index: int | None = None

    @property
    def n(self) -> int:
        return len(self.labels)

    def finite_indices(self) -> list[int]:
        return [i for i in range(self.n) if i != self.infinity_index]

    def is_ultrametric(self) -> bool:
        w = self.entries
        idx = range(self.n)
        for i in idx:
            for j in idx:
                if j == i:
                    continue
                wij = w[i][j]
                for k in idx:
                    if k == i or k == j:
                        continue
                    if wij < min(w[i][k], w[k][j]):
                        return False
        return True


def default_labels(points) -> list[str]:
    """Positional labels x1..xn; the infinity point is labeled ``inf``."""
    out = []
    for i, pt in enumerate(points):
        out.append("inf" if pt.is_infinity else f"x{i + 1}")
    return out


def _common_field(points):
    field = None
    for pt in points:
        if pt.is_infinity:
            continue
        if field is None:
            field = pt.finite().field
        elif pt.finite().field != field:
            raise FieldMismatchError("points live in different coefficient fields")
    return field


def _check_distinct(points, labels):
    groups: dict[int, list[int]] = {}
    assigned: dict[int, int] = {}
    for i in range(len(points)):
        if i in assigned:
            continue
        for j in range(i + 1, len(points)):
            if j in assigned:
                continue
            if points[i].equals(points[j]):
                groups.setdefault(i, [i]).append(j)
                assigned[j] = i
    if groups:
        named = [[labels[k] for k in members] for members in groups.values()]
        raise DuplicatePointError(
            f"duplicate points {named}; collapse collisions with moduli.collide",
            groups=named,
        )


def valuation_matrix(points, labels=None) -> ValuationMatrix:
    """Exact pairwise valuations of a pairwise-distinct point list."""
    points = list(points)
    if not points:
        raise InputError("empty point list")
    labels = list(labels) if labels is not None else default_labels(points)
    if len(labels) != len(points):
        raise InputError("labels and points differ in length")
    _common_field(points)
    _check_distinct(points, labels)
    inf_index = None
    for i, pt in enumerate(points):
        if pt.is_infinity:
            inf_index = i
    n = len(points)
    w = [[INF] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if i == inf_index or j == inf_index:
                other = points[j] if i == inf_index else points[i]
                entry = min(other.finite().valuation(), 0)
            else:
                diff = points[i].finite() - points[j].finite()
                entry = diff.valuation()
            w[i][j] = entry
            w[j][i] = entry
    return ValuationMatrix(
        tuple(labels), tuple(tuple(row) for row in w), inf_index
    )


@dataclass(frozen=True)
class VertexDescriptor:
    """A vertex of the ambient tree: the disk of radius q^(-level) at center."""

    center: ProjPoint
    level: int

    @property
    def is_unit_disk(self) -> bool:
        if self.level != 0 or self.center.is_infinity:
            return False
        return self.center.finite().valuation() >= 0


def vertex_of_triple(x0: ProjPoint, x1: ProjPoint, x2: ProjPoint) -> VertexDescriptor:
    """The branch vertex of three pairwise distinct points.

    It is the merge disk of the closest pair: the smallest disk containing
    the two points of maximal mutual valuation (for a triple containing
    infinity, the merge disk of the two finite points).
    """
    pts = [x0, x1, x2]
    labels = ["x0", "x1", "x2"]
    _check_distinct(pts, labels)
    finite = [pt for pt in pts if not pt.is_infinity]
    if len(finite) < 2:
        raise InputError("a triple may contain at most one infinity")
    if len(finite) == 2:
        a, b = finite
        return VertexDescriptor(a, int((a.finite() - b.finite()).valuation()))
    best = None
    for i in range(3):
        for j in range(i + 1, 3):
            v = int((pts[i].finite() - pts[j].finite()).valuation())
            if best is None or v > best[0]:
                best = (v, i)
    level, center_idx = best
    return VertexDescriptor(pts[center_idx], level)


def _cluster_lattice(matrix: ValuationMatrix):
    """Merge clusters keyed by (level, member set), from all finite pairs."""
    finite = matrix.finite_indices()
    w = matrix.entries
    clusters = {}
    for a_pos, i in enumerate(finite):
        for j in finite[a_pos + 1 :]:
            level = int(w[i][j])
            members = frozenset(k for k in finite if w[i][k] >= level)
            clusters[(level, members)] = True
    return sorted(clusters, key=lambda c: (c[0], min(c[1])))


def tree_from_matrix(matrix: ValuationMatrix) -> MarkedTree:
    """Stabilized marked tree of the point set behind a valuation matrix."""
    finite = matrix.finite_indices()
    labels = matrix.labels
    inf_label = (
        labels[matrix.infinity_index] if matrix.infinity_index is not None else None
    )
    if not finite:
        return MarkedTree(["v1"], [], {inf_label: "v1"}, infinity_label=inf_label)
    if len(finite) == 1:
        ends = {labels[finite[0]]: "v1"}
        if inf_label is not None:
            ends[inf_label] = "v1"
        return MarkedTree(["v1"], [], ends, infinity_label=inf_label)
    clusters = _cluster_lattice(matrix)
    ids = {cluster: f"v{k + 1}" for k, cluster in enumerate(clusters)}
    levels = {ids[c]: c[0] for c in clusters}
    edges = []
    children = {ids[c]: 0 for c in clusters}
    for level, members in clusters:
        parent = None
        for plevel, pmembers in clusters:
            if plevel < level and members <= pmembers:
                if parent is None or plevel > parent[0]:
                    parent = (plevel, pmembers)
        if parent is not None:
            edges.append((ids[parent], ids[(level, members)], level - parent[0]))
            children[ids[parent]] += 1
    ends = {}
    w = matrix.entries
    for i in finite:
        top = max(int(w[i][j]) for j in finite if j != i)
        home = next(c for c in clusters if c[0] == top and i in c[1])
        ends[labels[i]] = ids[home]
        children[ids[home]] += 1
    root_cluster = clusters[0]
    if inf_label is not None:
        ends[inf_label] = ids[root_cluster]
    return MarkedTree(
        list(ids.values()),
        edges,
        ends,
        infinity_label=inf_label,
        levels=levels,
    )


def check_branching(tree: MarkedTree, field) -> None:
    """Every vertex may branch downward into at most q residue directions."""
    if field is None:
        return
    q = field.q
    for v in tree.vertices:
        down = len(tree.ends_at(v)) + len(tree.neighbors(v))
        if tree.infinity_label is not None and tree.ends.get(tree.infinity_label) == v:
            down -= 1
        if not _is_top(tree, v):
            down -= 1  # one incident edge leads upward
        if down > q:
            raise BranchingError(down, field.p, field.m)


def _is_top(tree: MarkedTree, v: str) -> bool:
    if tree.levels and v in tree.levels:
        return tree.levels[v] == min(tree.levels.values())
    return False


def find_unit_disk_vertex(tree: MarkedTree, points, labels) -> str | None:
    """Vertex of the unit disk: the merge vertex of the points 0 and 1."""
    zero_label = one_label = None
    for pt, label in zip(points, labels):
        if pt.is_infinity:
            continue
        value = pt.finite()
        if value.is_zero():
            zero_label = label
        elif value.equals(PadicNumber.one(value.field)):
            one_label = label
    if zero_label is None or one_label is None:
        return None
    if zero_label not in tree.ends or one_label not in tree.ends:
        return None
    # walk the path between the two ends; v_D is the level-0 vertex on it
    if tree.levels is None:
        return None
    start = tree.ends[zero_label]
    goal = tree.ends[one_label]
    parent = {start: None}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            break
        for nbr in tree.neighbors(v):
            if nbr not in parent:
                parent[nbr] = v
                queue.append(nbr)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    for v in path:
        if tree.levels.get(v) == 0:
            return v
    return None


def build_projective_dendrogram(
    points, labels=None, normalize: bool = True
) -> MarkedTree:
    """Stabilized dendrogram whose ends biject with the given points.

    With ``normalize`` (the default), a configuration not containing all of
    0, 1 and infinity is first moved by the transformation sending its
    first three points there; the tree is invariant up to that relabeling
    of disks, while merge levels become chart-dependent.  The root marks
    the unit-disk vertex whenever the point set allows locating it.
    """
    points = list(points)
    if not points:
        raise InputError("empty point list")
    labels = list(labels) if labels is not None else default_labels(points)
    if len(labels) != len(set(labels)):
        raise InputError("end labels must be pairwise distinct")
    field = _common_field(points)
    if normalize and len(points) >= 3 and field is not None:
        if not _contains_standard_triple(points, field):
            _check_distinct(points[:3], labels[:3])
            alpha = normalizing_mobius(points[0], points[1], points[2])
            points = [alpha.apply(pt) for pt in points]
    matrix = valuation_matrix(points, labels)
    tree = tree_from_matrix(matrix)
    check_branching(tree, field)
    tree = stabilize(tree)
    root = find_unit_disk_vertex(tree, points, labels)
    if root is not None:
        tree = tree.copy(root=root)
    return tree


def _contains_standard_triple(points, field) -> bool:
    has_zero = has_one = has_inf = False
    one = PadicNumber.one(field)
    for pt in points:
        if pt.is_infinity:
            has_inf = True
        elif pt.finite().is_zero():
            has_zero = True
        elif pt.finite().equals(one):
            has_one = True
    return has_zero and has_one and has_inf


def single_linkage_oracle(matrix: ValuationMatrix) -> MarkedTree:
    """Naive agglomerative single linkage over the valuation matrix.

    Repeatedly merges the closest active clusters (largest mutual
    valuation), fusing every cluster tied at that level in one step.  Kept
    deliberately simple and separate from the lattice construction so the
    two can check each other.
    """
    if not matrix.is_ultrametric():
        raise InputError("matrix is not ultrametric")
    finite = matrix.finite_indices()
    labels = matrix.labels
    inf_label = (
        labels[matrix.infinity_index] if matrix.infinity_index is not None else None
    )
    if not finite:
        return MarkedTree(["v1"], [], {inf_label: "v1"}, infinity_label=inf_label)
    # cluster records: id -> (vertex or end payload)
    next_id = [0]

    def fresh():
        next_id[0] += 1
        return next_id[0]

    lvl: dict[int, dict[int, float]] = {}
    payload: dict[int, tuple] = {}
    for pos, i in enumerate(finite):
        cid = fresh()
        payload[cid] = ("end", labels[i])
        lvl[cid] = {}
        for other, j in zip(list(lvl)[:-1], finite[:pos]):
            lvl[cid][other] = matrix.entries[i][j]
            lvl[other][cid] = matrix.entries[i][j]
    vertices: list[str] = []
    edges: list[tuple[str, str, int]] = []
    ends: dict[str, str] = {}
    levels: dict[str, int] = {}

    def materialize(cid, parent_vertex, parent_level):
        kind, data = payload[cid]
        if kind == "end":
            ends[data] = parent_vertex
        else:
            vid, level = data
            edges.append((parent_vertex, vid, level - parent_level))

    while len(lvl) > 1:
        best = None
        for a in lvl:
            for b, value in lvl[a].items():
                if a < b and (best is None or value > best[0]):
                    best = (value, a, b)
        level = int(best[0])
        # union every active pair tied at this level
        tied_parent: dict[int, int] = {c: c for c in lvl}

        def find(x):
            while tied_parent[x] != x:
                tied_parent[x] = tied_parent[tied_parent[x]]
                x = tied_parent[x]
            return x

        for a in lvl:
            for b, value in lvl[a].items():
                if a < b and value == best[0]:
                    tied_parent[find(a)] = find(b)
        groups: dict[int, list[int]] = {}
        for c in lvl:
            groups.setdefault(find(c), []).append(c)
        for members in groups.values():
            if len(members) < 2:
                continue
            vid = f"v{fresh()}"
            vertices.append(vid)
            levels[vid] = level
            for cid in sorted(members):
                materialize(cid, vid, level)
            merged = fresh()
            payload[merged] = ("vertex", (vid, level))
            lvl[merged] = {}
            rest = [c for c in lvl if c not in members and c != merged]
            for other in rest:
                value = max(lvl[m][other] for m in members)
                lvl[merged][other] = value
                lvl[other][merged] = value
            for cid in members:
                for other in list(lvl[cid]):
                    del lvl[other][cid]
                del lvl[cid]
    (last,) = lvl
    kind, data = payload[last]
    if kind == "end":  # single finite point
        vid = "v1"
        vertices.append(vid)
        ends[data] = vid
        root_vertex = vid
    else:
        root_vertex = data[0]
    if inf_label is not None:
        ends[inf_label] = root_vertex
    tree = MarkedTree(
        vertices, edges, ends, infinity_label=inf_label, levels=levels
    )
    return stabilize(tree)
