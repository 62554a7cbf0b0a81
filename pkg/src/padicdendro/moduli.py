"""Configurations of labeled points, strata, families and collisions.

A configuration of n ordered points of the projective line is normalized
by the transformation sending its first three points to 0, 1, infinity.
Its stratum code is the end-labeled combinatorial shape of its dendrogram;
neighboring strata differ by one edge contraction.  Families are rows of
configurations sliced one row at a time, and colliding points degenerate
into trees of projective lines with the collision groups on bubble
components.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dataclass_field

from .builder import build_projective_dendrogram
from .errors import DuplicatePointError, InputError
from .fields import FieldSpec, parse_field_tag
from .mobius import Mobius, normalizing_mobius
from .padic import PadicNumber, ProjPoint, format_scalar, parse_scalar
from .tree import MarkedTree, canonical_form, contract_edge, parse_canonical


def _puncture_labels(n: int) -> list[str]:
    return [str(i + 1) for i in range(n)]


def _group_duplicates(points, labels):
    """First-occurrence representatives and the groups of coinciding labels."""
    reps: list[int] = []
    groups: dict[int, list[int]] = {}
    for i, pt in enumerate(points):
        for r in reps:
            if pt.equals(points[r]):
                groups.setdefault(r, [r]).append(i)
                break
        else:
            reps.append(i)
    named = {labels[r]: [labels[i] for i in members] for r, members in groups.items()}
    return reps, named


class Configuration:
    """Ordered points x_1..x_n of the projective line, punctures named 1..n."""

    def __init__(self, points):
        points = tuple(points)
        if len(points) < 3:
            raise InputError("a configuration needs at least 3 points")
        self.points = points

    def __len__(self):
        return len(self.points)

    @property
    def labels(self) -> list[str]:
        return _puncture_labels(len(self.points))

    def field(self) -> FieldSpec:
        for pt in self.points:
            if not pt.is_infinity:
                return pt.finite().field
        raise InputError("configuration has no finite point")

    def is_normalized(self) -> bool:
        first, second, third = self.points[:3]
        if first.is_infinity or second.is_infinity or not third.is_infinity:
            return False
        return first.finite().is_zero() and second.finite().equals(
            PadicNumber.one(second.finite().field)
        )

    def check_distinct(self):
        _, groups = _group_duplicates(self.points, self.labels)
        if groups:
            raise DuplicatePointError(
                f"configuration touches the fat diagonal: {groups}; "
                "route collisions through collide",
                groups=[members for members in groups.values()],
            )

    def __repr__(self):
        inner = ", ".join(format_scalar(pt) for pt in self.points)
        return f"Configuration([{inner}])"


def normalize_configuration(config: Configuration) -> tuple[Mobius, Configuration]:
    """Move the first three points to (0, 1, infinity); idempotent.

    Returns the applied transformation together with the normalized
    configuration.  Coincidences among the first three points are a
    degeneration and are routed to ``collide``.
    """
    pts = config.points
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i].equals(pts[j]):
                raise DuplicatePointError(
                    "first three points coincide; this configuration lies on "
                    "the boundary, use collide",
                    groups=[[str(i + 1), str(j + 1)]],
                )
    if config.is_normalized():
        alpha = Mobius.identity(config.field())
    else:
        alpha = normalizing_mobius(pts[0], pts[1], pts[2])
    moved = Configuration([alpha.apply(pt) for pt in pts])
    moved.check_distinct()
    return alpha, moved


def stratum_code(config: Configuration) -> str:
    """Length-forgetting end-labeled canonical shape of a normalized configuration."""
    if not config.is_normalized():
        raise InputError("stratum codes are defined for normalized configurations")
    config.check_distinct()
    tree = build_projective_dendrogram(
        config.points, labels=config.labels, normalize=False
    )
    return canonical_form(tree, labeled=True, lengths=False)


def stratum_tree(config: Configuration) -> MarkedTree:
    """The dendrogram behind the stratum code, with its merge levels."""
    if not config.is_normalized():
        raise InputError("stratum codes are defined for normalized configurations")
    config.check_distinct()
    return build_projective_dendrogram(
        config.points, labels=config.labels, normalize=False
    )


def strata_adjacent(code1: str, code2: str) -> bool:
    """True when one shape is the other with exactly one internal edge contracted."""
    t1 = parse_canonical(code1)
    t2 = parse_canonical(code2)
    if set(t1.ends) != set(t2.ends):
        raise InputError("stratum codes label different puncture sets")
    e1, e2 = t1.edges(), t2.edges()
    if abs(len(e1) - len(e2)) != 1:
        return False
    big, small_code = (t1, code2) if len(e1) > len(e2) else (t2, code1)
    target = canonical_form(parse_canonical(small_code), labeled=True, lengths=False)
    for u, v, _ in big.edges():
        contracted = contract_edge(big, u, v)
        if canonical_form(contracted, labeled=True, lengths=False) == target:
            return True
    return False


@dataclass(frozen=True)
class Family:
    """Rows of simultaneous positions: row j holds the points at time j."""

    rows: tuple[tuple[ProjPoint, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise InputError("family needs at least one row")
        width = len(self.rows[0])
        if width < 1:
            raise InputError("family rows are empty")
        for row in self.rows:
            if len(row) != width:
                raise InputError("family rows differ in length")

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def m(self) -> int:
        return len(self.rows)

    @classmethod
    def from_csv(cls, text: str, field: FieldSpec) -> "Family":
        rows = []
        for raw in csv.reader(io.StringIO(text)):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if raw[0].lstrip().startswith("#"):
                continue
            rows.append(tuple(parse_scalar(cell, field) for cell in raw))
        if not rows:
            raise InputError("family CSV has no rows")
        return cls(tuple(rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.rows:
            writer.writerow([format_scalar(pt) for pt in row])
        return buf.getvalue()


@dataclass(frozen=True)
class SliceResult:
    mobius: Mobius
    tree: MarkedTree
    duplicates: dict[str, list[str]]


def slice_family(family: Family, row_index: int) -> SliceResult:
    """Dendrogram of one family row after deduplication and normalization.

    Duplicate positions are collapsed to their first occurrence (reported
    in ``duplicates``); the remaining distinct points are normalized by the
    transformation sending the first three to (0, 1, infinity).
    """
    if not 0 <= row_index < family.m:
        raise InputError(f"row {row_index} out of range 0..{family.m - 1}")
    row = family.rows[row_index]
    labels = _puncture_labels(len(row))
    reps, duplicates = _group_duplicates(row, labels)
    distinct = [row[i] for i in reps]
    kept_labels = [labels[i] for i in reps]
    if len(distinct) < 3:
        raise InputError(
            f"row {row_index} has only {len(distinct)} distinct points; need 3"
        )
    alpha = normalizing_mobius(distinct[0], distinct[1], distinct[2])
    moved = [alpha.apply(pt) for pt in distinct]
    tree = build_projective_dendrogram(moved, labels=kept_labels, normalize=False)
    return SliceResult(alpha, tree, duplicates)


# -- stable trees of projective lines --


@dataclass(frozen=True)
class Component:
    """One projective line: its marks and its intersections with neighbors."""

    id: str
    marks: tuple[tuple[str, ProjPoint], ...]
    double_points: tuple[tuple[str, ProjPoint], ...]
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class StableTree:
    """A tree of projective lines with marked points."""

    field: FieldSpec
    components: tuple[Component, ...]

    def component(self, cid: str) -> Component:
        for comp in self.components:
            if comp.id == cid:
                return comp
        raise InputError(f"unknown component {cid!r}")

    def intersection_edges(self) -> list[tuple[str, str]]:
        """Each link once, as an ordered pair (smaller id first)."""
        counted: dict[tuple[str, str], int] = {}
        for comp in self.components:
            for other, _ in comp.double_points:
                key = tuple(sorted((comp.id, other)))
                counted[key] = counted.get(key, 0) + 1
        edges = []
        for key, count in sorted(counted.items()):
            edges.extend([key] * (count // 2))
        return edges

    def to_json(self) -> str:
        doc = {
            "format_version": 1,
            "type": "stable_tree",
            "field": self.field.tag(),
            "precision": self.field.precision,
            "components": [
                {
                    "id": comp.id,
                    "marks": [
                        [label, format_scalar(pos)] for label, pos in comp.marks
                    ],
                    "double_points": [
                        [other, format_scalar(pos)]
                        for other, pos in comp.double_points
                    ],
                    "flags": list(comp.flags),
                }
                for comp in self.components
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StableTree":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid stable tree JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("type") != "stable_tree":
            raise InputError("JSON document is not a stable_tree")
        p, m = parse_field_tag(doc.get("field", "2^1"))
        spec = FieldSpec(p, m, precision=int(doc.get("precision", 64)))
        comps = []
        try:
            for raw in doc["components"]:
                comps.append(
                    Component(
                        id=str(raw["id"]),
                        marks=tuple(
                            (str(label), parse_scalar(pos, spec))
                            for label, pos in raw.get("marks", [])
                        ),
                        double_points=tuple(
                            (str(other), parse_scalar(pos, spec))
                            for other, pos in raw.get("double_points", [])
                        ),
                        flags=tuple(raw.get("flags", [])),
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid stable tree JSON: {exc}") from None
        return cls(spec, tuple(comps))

    def to_dot(self) -> str:
        lines = ["graph stable_tree {", "  node [shape=ellipse];"]
        for comp in self.components:
            mark_names = ",".join(label for label, _ in comp.marks) or "-"
            shape_line = (
                f'  "{comp.id}" [label="{comp.id}\\nmarks: {mark_names}"];'
            )
            lines.append(shape_line)
        for a, b in self.intersection_edges():
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _canonical_bubble_positions(field: FieldSpec, count: int):
    """Pairwise distinct canonical positions: 0, 1, inf, then 2, 3, ..."""
    slots: list[ProjPoint] = []
    next_int = 2
    for k in range(count):
        if k == 0:
            slots.append(ProjPoint.from_int(field, 0))
        elif k == 1:
            slots.append(ProjPoint.from_int(field, 1))
        elif k == 2:
            slots.append(ProjPoint.infinity())
        else:
            slots.append(ProjPoint.from_int(field, next_int))
            next_int += 1
    return slots, next_int


def collide(points, labels=None) -> StableTree:
    """Collapse coinciding points onto bubble components of a stable tree.

    The distinct positions stay on the base line; each group of coinciding
    points becomes a fresh projective line attached at the collision
    position by a double point and carrying the group's marks at canonical
    pairwise-distinct positions.  Groups of three or more marks are flagged
    ``nesting-ambiguous``: their inner degeneration order is not inferred.
    """
    points = list(points)
    if not points:
        raise InputError("empty point list")
    labels = list(labels) if labels is not None else _puncture_labels(len(points))
    if len(labels) != len(points):
        raise InputError("labels and points differ in length")
    spec = None
    for pt in points:
        if not pt.is_infinity:
            spec = pt.finite().field
            break
    if spec is None:
        raise InputError("all points at infinity")
    reps, groups = _group_duplicates(points, labels)
    if len(reps) == 1 and len(points) > 1:
        raise InputError("all points coincide; no base configuration remains")
    group_reps = {labels.index(rep_label) for rep_label in groups}
    singles = [i for i in reps if i not in group_reps]
    if len(singles) + len(groups) < 3:
        raise InputError(
            "base component would carry fewer than 3 special points; such "
            "deeper degenerations (bubbles meeting bubbles) are not modeled"
        )
    if not groups:
        base = Component(
            id="L",
            marks=tuple((labels[i], points[i]) for i in reps),
            double_points=(),
        )
        return StableTree(spec, (base,))
    base_marks = tuple((labels[i], points[i]) for i in singles)
    base_doubles = []
    bubbles = []
    for k, (rep_label, members) in enumerate(sorted(groups.items(), key=lambda kv: labels.index(kv[0]))):
        bubble_id = f"B{k + 1}"
        position = points[labels.index(rep_label)]
        base_doubles.append((bubble_id, position))
        slots, next_int = _canonical_bubble_positions(spec, len(members))
        if len(members) <= 2:
            double_pos = ProjPoint.infinity()
        else:
            double_pos = ProjPoint.from_int(spec, next_int)
        flags = ("nesting-ambiguous",) if len(members) >= 3 else ()
        bubbles.append(
            Component(
                id=bubble_id,
                marks=tuple(zip(members, slots)),
                double_points=(("L", double_pos),),
                flags=flags,
            )
        )
    base = Component(id="L", marks=base_marks, double_points=tuple(base_doubles))
    return StableTree(spec, (base,) + tuple(bubbles))


def validate_stable(stable: StableTree) -> tuple[bool, list[str]]:
    """Check the four defining properties; returns (valid, violations).

    (1) singular points are ordinary double points; (2) the intersection
    graph is a tree; (3) every component carries at least 3 special
    points; (4) marks are regular (and pairwise distinct) points.
    """
    violations: list[str] = []
    ids = [comp.id for comp in stable.components]
    if len(set(ids)) != len(ids):
        violations.append("property1: duplicate component ids")
    id_set = set(ids)

    link_counts: dict[tuple[str, str], int] = {}
    for comp in stable.components:
        positions = list(comp.double_points)
        for idx, (other, pos) in enumerate(positions):
            if other not in id_set:
                violations.append(
                    f"property1: {comp.id} intersects unknown component {other}"
                )
                continue
            for other2, pos2 in positions[idx + 1 :]:
                if pos.equals(pos2):
                    violations.append(
                        f"property1: two double points of {comp.id} coincide "
                        "(not an ordinary double point)"
                    )
            link_counts[(comp.id, other)] = link_counts.get((comp.id, other), 0) + 1
    for (a, b), count in sorted(link_counts.items()):
        if link_counts.get((b, a), 0) != count:
            violations.append(
                f"property1: intersection of {a} and {b} is not mirrored "
                "on both components"
            )

    # property 2: connected and acyclic over whole links
    edge_count = sum(link_counts.values()) / 2
    if len(stable.components) > 1 or edge_count:
        adjacency: dict[str, set[str]] = {cid: set() for cid in ids}
        for (a, b), _ in link_counts.items():
            if b in id_set and a in id_set:
                adjacency[a].add(b)
                adjacency[b].add(a)
        seen = set()
        stack = [ids[0]] if ids else []
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adjacency[v])
        if len(seen) != len(ids):
            violations.append("property2: intersection graph is disconnected")
        if edge_count != len(ids) - 1:
            violations.append(
                "property2: intersection graph has "
                f"{edge_count:g} links over {len(ids)} components (not a tree)"
            )

    for comp in stable.components:
        special = len(comp.marks) + len(comp.double_points)
        if special < 3:
            violations.append(
                f"property3: component {comp.id} carries {special} special "
                "points (needs at least 3)"
            )

    for comp in stable.components:
        for idx, (label, pos) in enumerate(comp.marks):
            for other, dpos in comp.double_points:
                if pos.equals(dpos):
                    violations.append(
                        f"property4: mark {label} on {comp.id} lies on the "
                        f"double point toward {other}"
                    )
            for label2, pos2 in comp.marks[idx + 1 :]:
                if pos.equals(pos2):
                    violations.append(
                        f"property4: marks {label} and {label2} coincide on "
                        f"{comp.id}"
                    )
    return (not violations, violations)
