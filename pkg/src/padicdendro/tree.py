"""Finite marked metric trees.

A MarkedTree is a finite tree with positive integer edge lengths and a set
of labeled ends (halflines) attached to vertices.  It represents projective
dendrograms, their finite parts, and classical dendrograms alike; the
optional root marks the vertex of the unit disk when it is known, and
``infinity_label`` names the end corresponding to the point at infinity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InputError

_LABEL_FORBIDDEN = set('(),|:;~"')


def _check_label(label: str) -> str:
    if not isinstance(label, str) or not label:
        raise InputError(f"end label must be a nonempty string, got {label!r}")
    if any(ch in _LABEL_FORBIDDEN or ch.isspace() for ch in label):
        raise InputError(f"end label {label!r} contains a forbidden character")
    return label


class MarkedTree:
    """Immutable-by-convention marked tree; mutating operations return copies."""

    __slots__ = ("_adj", "ends", "root", "infinity_label", "levels")

    def __init__(
        self,
        vertices,
        edges,
        ends,
        root: str | None = None,
        infinity_label: str | None = None,
        levels: dict[str, int] | None = None,
    ):
        adj: dict[str, dict[str, int]] = {str(v): {} for v in vertices}
        if not adj:
            raise InputError("a tree needs at least one vertex")
        for u, v, length in edges:
            u, v = str(u), str(v)
            if u not in adj or v not in adj:
                raise InputError(f"edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                raise InputError(f"self-loop at {u}")
            if v in adj[u]:
                raise InputError(f"duplicate edge ({u}, {v})")
            if not isinstance(length, int) or length <= 0:
                raise InputError(f"edge ({u}, {v}) length must be a positive integer")
            adj[u][v] = length
            adj[v][u] = length
        edge_count = sum(len(nbrs) for nbrs in adj.values()) // 2
        if edge_count != len(adj) - 1:
            raise InputError("edge set does not form a tree")
        # connectivity
        seen = set()
        stack = [next(iter(adj))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v])
        if len(seen) != len(adj):
            raise InputError("tree is not connected")
        self._adj = adj
        end_map: dict[str, str] = {}
        for label, vertex in dict(ends).items():
            label = _check_label(label)
            vertex = str(vertex)
            if vertex not in adj:
                raise InputError(f"end {label!r} attaches to unknown vertex {vertex}")
            end_map[label] = vertex
        self.ends = end_map
        if root is not None and str(root) not in adj:
            raise InputError(f"root {root!r} is not a vertex")
        self.root = None if root is None else str(root)
        if infinity_label is not None and infinity_label not in end_map:
            raise InputError(f"infinity label {infinity_label!r} is not an end")
        self.infinity_label = infinity_label
        if levels is not None:
            levels = {str(v): int(l) for v, l in levels.items() if str(v) in adj}
        self.levels = levels

    # -- queries --

    @property
    def vertices(self) -> list[str]:
        return sorted(self._adj)

    def edges(self):
        out = []
        for u, nbrs in self._adj.items():
            for v, length in nbrs.items():
                if u < v:
                    out.append((u, v, length))
        return sorted(out)

    def neighbors(self, v: str) -> dict[str, int]:
        if v not in self._adj:
            raise InputError(f"unknown vertex {v!r}")
        return dict(self._adj[v])

    def ends_at(self, v: str) -> list[str]:
        if v not in self._adj:
            raise InputError(f"unknown vertex {v!r}")
        return sorted(label for label, vert in self.ends.items() if vert == v)

    def total_length(self) -> int:
        return sum(length for _, _, length in self.edges())

    def copy(
        self, root="unset", infinity_label="unset", levels="unset"
    ) -> "MarkedTree":
        return MarkedTree(
            self.vertices,
            self.edges(),
            self.ends,
            root=self.root if root == "unset" else root,
            infinity_label=(
                self.infinity_label if infinity_label == "unset" else infinity_label
            ),
            levels=self.levels if levels == "unset" else levels,
        )

    def __repr__(self):
        return (
            f"MarkedTree({len(self._adj)} vertices, {len(self.ends)} ends,"
            f" root={self.root!r})"
        )


@dataclass(frozen=True)
class Star:
    """Edges and ends emanating from one vertex."""

    vertex: str
    edges: tuple[tuple[str, int], ...]
    ends: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.edges) + len(self.ends)


def star(tree: MarkedTree, v: str, include_ends: bool = True) -> Star:
    """Star of a vertex; with include_ends=False, the star in the finite part."""
    nbrs = tuple(sorted(tree.neighbors(v).items()))
    ends = tuple(tree.ends_at(v)) if include_ends else ()
    return Star(v, nbrs, ends)


def order(tree: MarkedTree, v: str, include_ends: bool = True) -> int:
    """Number of branches at a vertex under the chosen star convention."""
    return star(tree, v, include_ends).size


def tips(tree: MarkedTree, subgraph: set[str] | None = None) -> set[str]:
    """Vertices of order exactly 1 in the induced subgraph (whole tree if None)."""
    if subgraph is None:
        subgraph = set(tree._adj)
    else:
        subgraph = set(subgraph)
        for v in subgraph:
            if v not in tree._adj:
                raise InputError(f"unknown vertex {v!r}")
    out = set()
    for v in subgraph:
        deg = sum(1 for n in tree._adj[v] if n in subgraph)
        if deg == 1:
            out.add(v)
    return out


def stabilize(tree: MarkedTree, keep=()) -> MarkedTree:
    """Contract every vertex of total order 2, preserving path lengths.

    Chains of edges through order-2 vertices collapse to single edges of the
    summed length; an order-2 vertex carrying one end hands the end to its
    neighbor.  Vertices listed in ``keep`` are exempt.
    """
    keep = set(keep)
    adj = {v: dict(nbrs) for v, nbrs in tree._adj.items()}
    ends = dict(tree.ends)
    levels = dict(tree.levels) if tree.levels is not None else None
    root = tree.root

    def ends_of(v):
        return [label for label, vert in ends.items() if vert == v]

    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v in keep or len(adj) == 1:
                continue
            here = ends_of(v)
            deg = len(adj[v])
            if deg + len(here) != 2:
                continue
            if deg == 2:
                (n1, l1), (n2, l2) = sorted(adj[v].items())
                del adj[n1][v]
                del adj[n2][v]
                adj[n1][n2] = l1 + l2
                adj[n2][n1] = l1 + l2
            elif deg == 1 and len(here) == 1:
                (n1, _), = adj[v].items()
                del adj[n1][v]
                ends[here[0]] = n1
            else:  # two ends, no edges: degenerate geodesic form, keep
                continue
            del adj[v]
            if levels is not None:
                levels.pop(v, None)
            if root == v:
                root = None
            changed = True
            break
    vertices = sorted(adj)
    edge_list = [
        (u, w, length)
        for u, nbrs in adj.items()
        for w, length in nbrs.items()
        if u < w
    ]
    return MarkedTree(
        vertices,
        edge_list,
        ends,
        root=root,
        infinity_label=tree.infinity_label,
        levels=levels,
    )


def classical_view(tree: MarkedTree) -> MarkedTree:
    """Drop the infinity halfline and root the remaining dendrogram.

    The root is the vertex where the infinity end attached, i.e. the
    coarsest merge vertex; for a configuration of integral points
    containing 0 and 1 this is exactly the unit-disk vertex.
    """
    if tree.infinity_label is None:
        raise InputError("tree has no infinity end")
    root = tree.ends[tree.infinity_label]
    ends = {l: v for l, v in tree.ends.items() if l != tree.infinity_label}
    if not ends:
        raise InputError("classical view needs at least one finite end")
    stripped = MarkedTree(
        tree.vertices,
        tree.edges(),
        ends,
        root=root,
        infinity_label=None,
        levels=tree.levels,
    )
    return stabilize(stripped, keep={root})


# -- canonical forms and isomorphism --


def canonical_form(tree: MarkedTree, labeled: bool = True, lengths: bool = True) -> str:
    """Deterministic serialization deciding (labeled) isomorphism.

    Labeled trees are rooted at the vertex holding the lexicographically
    smallest end label; unlabeled trees at the centroid (the smaller of the
    two serializations when the centroid is an edge).  Children sort by
    their serialization strings.
    """
    if labeled and tree.ends:
        anchor = tree.ends[min(tree.ends)]
        return _serialize_from(tree, anchor, labeled, lengths)
    candidates = _centroids(tree)
    return min(_serialize_from(tree, v, labeled, lengths) for v in candidates)


def _serialize_from(tree, anchor, labeled, lengths):
    def ser(v, parent):
        items = [label if labeled else "*" for label in tree.ends_at(v)]
        for nbr, length in tree._adj[v].items():
            if nbr == parent:
                continue
            sub = ser(nbr, v)
            items.append(f"{length}{sub}" if lengths else sub)
        return "(" + ",".join(sorted(items)) + ")"

    return ser(anchor, None)


def _centroids(tree: MarkedTree) -> list[str]:
    verts = tree.vertices
    n = len(verts)
    if n == 1:
        return verts
    best_score = None
    best = []
    for v in verts:
        # max component size after removing v
        score = 0
        seen = {v}
        for nbr in tree._adj[v]:
            if nbr in seen:
                continue
            size = 0
            stack = [nbr]
            comp_seen = {v}
            while stack:
                w = stack.pop()
                if w in comp_seen:
                    continue
                comp_seen.add(w)
                size += 1
                stack.extend(tree._adj[w])
            score = max(score, size)
        if best_score is None or score < best_score:
            best_score, best = score, [v]
        elif score == best_score:
            best.append(v)
    return best


def labeled_isomorphic(t1: MarkedTree, t2: MarkedTree) -> bool:
    """Isomorphism respecting end labels and exact edge lengths."""
    if set(t1.ends) != set(t2.ends):
        return False
    return canonical_form(t1) == canonical_form(t2)


def parse_canonical(text: str) -> MarkedTree:
    """Rebuild a marked tree from a canonical-form string.

    Edge lengths absent from the string (length-free canonical forms, e.g.
    stratum codes) default to 1.
    """
    s = text.strip()
    pos = 0
    counter = [0]
    vertices: list[str] = []
    edges: list[tuple[str, str, int]] = []
    ends: dict[str, str] = {}

    def fail(msg):
        raise InputError(f"malformed canonical tree at offset {pos}: {msg}")

    def new_vertex():
        vid = f"v{counter[0]}"
        counter[0] += 1
        vertices.append(vid)
        return vid

    def parse_node():
        nonlocal pos
        if pos >= len(s) or s[pos] != "(":
            fail("expected '('")
        pos += 1
        vid = new_vertex()
        while pos < len(s) and s[pos] != ")":
            if s[pos] == ",":
                pos += 1
                continue
            if s[pos] == "(":
                child = parse_node()
                edges.append((vid, child, 1))
            elif s[pos].isdigit() and _peek_length(s, pos) is not None:
                length, nxt = _peek_length(s, pos)
                pos = nxt
                child = parse_node()
                edges.append((vid, child, length))
            else:
                start = pos
                while pos < len(s) and s[pos] not in ",()":
                    pos += 1
                label = s[start:pos]
                if label in ends:
                    fail(f"duplicate end label {label!r}")
                ends[_check_label(label) if label != "*" else _fresh_star(ends)] = vid
        if pos >= len(s):
            fail("unbalanced parentheses")
        pos += 1
        return vid

    def _fresh_star(existing):
        i = 0
        while f"*{i}" in existing:
            i += 1
        return f"*{i}"

    root = parse_node()
    if pos != len(s):
        fail("trailing characters")
    del root
    return MarkedTree(vertices, edges, ends)


def _peek_length(s: str, pos: int):
    """(length, next position) when digits at pos are followed by '('."""
    i = pos
    while i < len(s) and s[i].isdigit():
        i += 1
    if i > pos and i < len(s) and s[i] == "(":
        return int(s[pos:i]), i
    return None


def contract_edge(tree: MarkedTree, u: str, v: str) -> MarkedTree:
    """Merge v into u along the edge (u, v); the edge length is dropped."""
    if v not in tree.neighbors(u):
        raise InputError(f"({u}, {v}) is not an edge")
    adj = {w: dict(nbrs) for w, nbrs in tree._adj.items()}
    del adj[u][v]
    del adj[v][u]
    for w, length in adj[v].items():
        del adj[w][v]
        adj[w][u] = length
        adj[u][w] = length
    del adj[v]
    ends = {l: (u if w == v else w) for l, w in tree.ends.items()}
    levels = None
    if tree.levels is not None:
        levels = {w: l for w, l in tree.levels.items() if w != v}
    root = u if tree.root == v else tree.root
    return MarkedTree(
        sorted(adj),
        [(a, b, l) for a, nbrs in adj.items() for b, l in nbrs.items() if a < b],
        ends,
        root=root,
        infinity_label=tree.infinity_label,
        levels=levels,
    )


# -- export formats --


def _export_root(tree: MarkedTree) -> str:
    if tree.root is not None:
        return tree.root
    if tree.ends:
        return tree.ends[min(tree.ends)]
    return tree.vertices[0]


def to_newick(tree: MarkedTree) -> str:
    """Newick with integer branch lengths; ends carry the length tag ``inf``.

    The infinity end is omitted when it attaches at the serialization root
    (it is the implicit upward halfline of a rooted dendrogram).
    """
    root = _export_root(tree)
    omit = None
    if tree.infinity_label is not None and tree.ends[tree.infinity_label] == root:
        omit = tree.infinity_label

    def render(v, parent):
        parts = [f"{label}:inf" for label in tree.ends_at(v) if label != omit]
        for nbr, length in sorted(tree._adj[v].items()):
            if nbr == parent:
                continue
            parts.append(f"{render(nbr, v)}:{length}")
        name = "root" if v == root and tree.root is not None else ""
        if not parts:
            return name or v
        return "(" + ",".join(sorted(parts)) + ")" + name

    return render(root, None) + ";"


def to_dot(tree: MarkedTree) -> str:
    """Graphviz digraph oriented away from the root; ends are boxed leaves."""
    root = _export_root(tree)
    lines = ["digraph dendrogram {", "  node [shape=circle];"]
    for v in tree.vertices:
        attrs = []
        if tree.levels is not None and v in tree.levels:
            attrs.append(f'label="{v}\\nlevel {tree.levels[v]}"')
        if v == tree.root:
            attrs.append("style=bold")
        lines.append(f'  "{v}"' + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    order_pairs = []
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for nbr, length in sorted(tree._adj[v].items()):
            if nbr not in seen:
                seen.add(nbr)
                order_pairs.append((v, nbr, length))
                queue.append(nbr)
    for u, v, length in order_pairs:
        lines.append(f'  "{u}" -> "{v}" [label="{length}"];')
    for label in sorted(tree.ends):
        v = tree.ends[label]
        lines.append(f'  "end:{label}" [shape=box, label="{label}"];')
        lines.append(f'  "{v}" -> "end:{label}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(tree: MarkedTree) -> str:
    doc = {
        "format_version": 1,
        "type": "marked_tree",
        "vertices": tree.vertices,
        "edges": [[u, v, l] for u, v, l in tree.edges()],
        "ends": dict(sorted(tree.ends.items())),
        "root": tree.root,
        "infinity_label": tree.infinity_label,
        "levels": (
            None
            if tree.levels is None
            else {v: tree.levels[v] for v in sorted(tree.levels)}
        ),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def tree_from_json(text: str) -> MarkedTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid tree JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "marked_tree":
        raise InputError("JSON document is not a marked_tree")
    try:
        return MarkedTree(
            doc["vertices"],
            [tuple(e) for e in doc["edges"]],
            doc["ends"],
            root=doc.get("root"),
            infinity_label=doc.get("infinity_label"),
            levels=doc.get("levels"),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"invalid tree JSON: {exc}") from None
