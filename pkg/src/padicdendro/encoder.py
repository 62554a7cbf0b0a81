"""Digit encoding of classical dendrograms.

Every leaf of a level-labeled dendrogram receives an exact integral scalar
by distributing the residue digits 0..q-1 across sibling branches: walking
from the root to a leaf, the digit picked up at an internal vertex of level
v contributes digit * p^v to the leaf's code.  Decoding rebuilds the tree
from the pairwise valuations of the codes with an extra end at infinity.
"""

from __future__ import annotations

import csv
import io
import json

from .builder import build_projective_dendrogram
from .errors import BranchingError, InputError
from .fields import FieldSpec, parse_field_tag
from .padic import PadicNumber, ProjPoint, format_scalar, parse_scalar
from .tree import MarkedTree, classical_view


class DendroNode:
    """Node of a classical dendrogram: a labeled leaf or a leveled merge."""

    __slots__ = ("level", "label", "children")

    def __init__(self, level=None, label=None, children=()):
        self.level = level
        self.label = label
        self.children = list(children)

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    @classmethod
    def leaf(cls, label: str) -> "DendroNode":
        return cls(label=label)

    @classmethod
    def merge(cls, level: int, children) -> "DendroNode":
        return cls(level=level, children=children)


class ClassicalDendrogram:
    """Rooted dendrogram with strictly increasing integer levels.

    Internal vertices carry levels >= 0 growing away from the root; every
    internal vertex except the root has at least two children (the root may
    have one, standing under its implicit upward segment).
    """

    def __init__(self, root: DendroNode):
        if root.is_leaf:
            raise InputError("dendrogram root must be an internal vertex")
        labels: list[str] = []

        def walk(node, parent_level, is_root):
            if node.is_leaf:
                if not node.label:
                    raise InputError("leaf without a label")
                labels.append(node.label)
                return
            if not isinstance(node.level, int) or node.level < 0:
                raise InputError(f"internal level {node.level!r} must be an int >= 0")
            if parent_level is not None and node.level <= parent_level:
                raise InputError("child level must exceed the parent level")
            minimum = 1 if is_root else 2
            if len(node.children) < minimum:
                raise InputError(
                    f"internal vertex needs >= {minimum} children, got "
                    f"{len(node.children)}"
                )
            for child in node.children:
                walk(child, node.level, False)

        walk(root, None, True)
        if len(set(labels)) != len(labels):
            raise InputError("leaf labels must be pairwise distinct")
        self.root = root
        self._labels = labels

    def leaves(self) -> list[str]:
        return list(self._labels)

    def max_branching(self) -> int:
        best = 0

        def walk(node):
            nonlocal best
            if node.is_leaf:
                return
            best = max(best, len(node.children))
            for child in node.children:
                walk(child)

        walk(self.root)
        return best

    def canonical_string(self) -> str:
        """Level-aware canonical form; equal strings mean equal level trees."""

        def ser(node):
            if node.is_leaf:
                return node.label
            inner = ",".join(sorted(ser(c) for c in node.children))
            return f"{node.level}({inner})"

        return ser(self.root)

    def sorted_copy(self) -> "ClassicalDendrogram":
        """Copy with children ordered by their smallest leaf label."""

        def rebuild(node):
            if node.is_leaf:
                return DendroNode.leaf(node.label)
            children = [rebuild(c) for c in node.children]
            children.sort(key=_min_leaf)
            return DendroNode.merge(node.level, children)

        return ClassicalDendrogram(rebuild(self.root))

    # -- conversions --

    @classmethod
    def from_marked_tree(cls, tree: MarkedTree) -> "ClassicalDendrogram":
        """Rooted marked tree with levels -> dendrogram (children sorted)."""
        if tree.root is None:
            raise InputError("tree has no root")
        levels = tree.levels
        if levels is None:
            levels = {}
            stack = [(tree.root, 0)]
            while stack:
                v, depth = stack.pop()
                levels[v] = depth
                for nbr, length in tree.neighbors(v).items():
                    if nbr not in levels:
                        stack.append((nbr, depth + length))

        def build(v, parent):
            children = [DendroNode.leaf(label) for label in tree.ends_at(v)]
            for nbr in tree.neighbors(v):
                if nbr != parent:
                    children.append(build(nbr, v))
            children.sort(key=_min_leaf)
            return DendroNode.merge(levels[v], children)

        return cls(build(tree.root, None))

    def to_json(self) -> str:
        def node_doc(node):
            if node.is_leaf:
                return {"label": node.label}
            return {
                "level": node.level,
                "children": [node_doc(c) for c in node.children],
            }

        doc = {
            "format_version": 1,
            "type": "classical_dendrogram",
            "root": node_doc(self.root),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ClassicalDendrogram":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid dendrogram JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("type") != "classical_dendrogram":
            raise InputError("JSON document is not a classical_dendrogram")

        def parse_node(obj):
            if "label" in obj:
                return DendroNode.leaf(obj["label"])
            return DendroNode.merge(
                obj.get("level"), [parse_node(c) for c in obj.get("children", [])]
            )

        try:
            return cls(parse_node(doc["root"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"invalid dendrogram JSON: {exc}") from None

    def to_newick(self) -> str:
        """Newick with level gaps as branch lengths.

        Leaves carry the conventional length 0; the root name carries its
        absolute level as ``root:LEVEL`` so parsing restores all levels.
        """

        def render(node, parent_level):
            if node.is_leaf:
                return f"{node.label}:0"
            inner = ",".join(sorted(render(c, node.level) for c in node.children))
            if parent_level is None:
                return f"({inner})root:{node.level}"
            return f"({inner}):{node.level - parent_level}"

        return render(self.root, None) + ";"

    @classmethod
    def from_newick(cls, text: str) -> "ClassicalDendrogram":
        s = text.strip()
        if s.endswith(";"):
            s = s[:-1]
        pos = 0

        def fail(msg):
            raise InputError(f"malformed newick at offset {pos}: {msg}")

        def parse_node():
            nonlocal pos
            if pos < len(s) and s[pos] == "(":
                pos += 1
                children = [parse_node()]
                while pos < len(s) and s[pos] == ",":
                    pos += 1
                    children.append(parse_node())
                if pos >= len(s) or s[pos] != ")":
                    fail("expected ')'")
                pos += 1
                _name = _scan_token()
                length = _scan_length()
                return ("internal", length, children)
            label = _scan_token()
            if not label:
                fail("expected a leaf label")
            length = _scan_length()
            del length
            return ("leaf", None, label)

        def _scan_token():
            nonlocal pos
            start = pos
            while pos < len(s) and s[pos] not in ",():;":
                pos += 1
            return s[start:pos]

        def _scan_length():
            nonlocal pos
            if pos < len(s) and s[pos] == ":":
                pos += 1
                start = pos
                while pos < len(s) and s[pos] not in ",()":
                    pos += 1
                try:
                    return int(s[start:pos])
                except ValueError:
                    fail(f"branch length {s[start:pos]!r} is not an integer")
            return None

        raw = parse_node()
        if pos != len(s):
            fail("trailing characters")
        if raw[0] != "internal":
            raise InputError("newick dendrogram must have an internal root")

        def build(node, parent_level):
            kind, length, payload = node
            if kind == "leaf":
                return DendroNode.leaf(payload)
            if parent_level is None:
                level = length if length is not None else 0
            else:
                if length is None:
                    fail("internal branch without a length")
                level = parent_level + length
            return DendroNode.merge(level, [build(c, level) for c in payload])

        return cls(build(raw, None))


def _min_leaf(node: DendroNode) -> str:
    if node.is_leaf:
        return node.label
    return min(_min_leaf(c) for c in node.children)


class CodeAssignment:
    """Exact integral codes per leaf label."""

    def __init__(self, field: FieldSpec, codes: dict[str, PadicNumber]):
        self.field = field
        items = list(codes.items())
        for label, code in items:
            if label == "inf":
                raise InputError("'inf' is reserved for the end at infinity")
            if code.field != field:
                raise InputError(f"code for {label!r} uses a different field")
            if not code.exact:
                raise InputError(f"code for {label!r} is not an exact expansion")
            if not code.is_zero() and code.valuation() < 0:
                raise InputError(f"code for {label!r} has negative valuation")
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if items[i][1].equals(items[j][1]):
                    raise InputError(
                        f"codes for {items[i][0]!r} and {items[j][0]!r} coincide"
                    )
        self.codes = dict(items)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "code"])
        for label in sorted(self.codes):
            writer.writerow([label, format_scalar(self.codes[label])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, precision: int = 64) -> "CodeAssignment":
        rows = [row for row in csv.reader(io.StringIO(text)) if row]
        if not rows:
            raise InputError("empty code CSV")
        if [cell.strip() for cell in rows[0]] == ["label", "code"]:
            rows = rows[1:]
        if not rows:
            raise InputError("code CSV has no data rows")
        field = None
        codes: dict[str, PadicNumber] = {}
        for row in rows:
            if len(row) != 2:
                raise InputError(f"expected 'label,code' rows, got {row!r}")
            label, scalar = row[0].strip(), row[1].strip()
            if field is None:
                if ":" in scalar:
                    p, m = parse_field_tag(scalar.split(":", 1)[0])
                else:
                    p, m = 2, 1
                field = FieldSpec(p, m, precision=precision)
            point = parse_scalar(scalar, field)
            if point.is_infinity:
                raise InputError(f"code for {label!r} cannot be infinity")
            if label in codes:
                raise InputError(f"duplicate label {label!r}")
            codes[label] = point.finite()
        return cls(field, codes)


def choose_field(max_branching: int, p: int = 2, precision: int = 64) -> FieldSpec:
    """Smallest residue degree whose field fits the given branching."""
    if max_branching < 1:
        raise InputError("max branching must be >= 1")
    m = 1
    while p**m < max_branching:
        m += 1
    return FieldSpec(p, m, precision=precision)


def encode_dendrogram(
    dendrogram: ClassicalDendrogram, field: FieldSpec | None = None, p: int = 2
) -> CodeAssignment:
    """Assign codes by giving the k-th child of each vertex digit k.

    With ``field=None`` the smallest sufficient residue degree over p is
    chosen automatically; otherwise branching beyond q raises
    BranchingError.
    """
    if field is None:
        field = choose_field(dendrogram.max_branching(), p=p)
    codes: dict[str, PadicNumber] = {}

    def walk(node, placed):
        if node.is_leaf:
            codes[node.label] = PadicNumber.from_digit_positions(field, placed)
            return
        if len(node.children) > field.q:
            raise BranchingError(len(node.children), field.p, field.m)
        for digit, child in enumerate(node.children):
            child_placed = dict(placed)
            if digit:
                child_placed[node.level] = digit
            walk(child, child_placed)

    walk(dendrogram.root, {})
    return CodeAssignment(field, codes)


def decode_codes(assignment: CodeAssignment) -> ClassicalDendrogram:
    """Rebuild the dendrogram of a code set from its pairwise valuations."""
    labels = list(assignment.codes)
    points = [ProjPoint.of(assignment.codes[label]) for label in labels]
    points.append(ProjPoint.infinity())
    labels.append("inf")
    tree = build_projective_dendrogram(points, labels, normalize=False)
    return ClassicalDendrogram.from_marked_tree(classical_view(tree))
