"""Exact p-adic dendrograms: trees on the projective line, digit codes,
moduli strata and collision degenerations."""

from .builder import (
    ValuationMatrix,
    VertexDescriptor,
    build_projective_dendrogram,
    single_linkage_oracle,
    valuation_matrix,
    vertex_of_triple,
)
from .encoder import (
    ClassicalDendrogram,
    CodeAssignment,
    DendroNode,
    choose_field,
    decode_codes,
    encode_dendrogram,
)
from .errors import (
    BranchingError,
    DuplicatePointError,
    FieldMismatchError,
    IndeterminateError,
    InputError,
    PadicDendroError,
)
from .fields import FieldSpec, is_irreducible, smallest_irreducible
from .hidden import (
    HiddenReport,
    check_bounds,
    enumerate_labeled,
    enumerate_shapes,
    extremal_dendrogram,
    hidden_report,
    hidden_subgraph,
)
from .mobius import Mobius, cross_ratio, normalizing_mobius
from .moduli import (
    Component,
    Configuration,
    Family,
    SliceResult,
    StableTree,
    collide,
    normalize_configuration,
    slice_family,
    strata_adjacent,
    stratum_code,
    stratum_tree,
    validate_stable,
)
from .padic import INF, PadicNumber, ProjPoint, format_scalar, parse_scalar, val
from .tree import (
    MarkedTree,
    Star,
    canonical_form,
    classical_view,
    contract_edge,
    labeled_isomorphic,
    order,
    parse_canonical,
    stabilize,
    star,
    tips,
    to_dot,
    to_newick,
    tree_from_json,
    tree_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BranchingError",
    "ClassicalDendrogram",
    "CodeAssignment",
    "Component",
    "Configuration",
    "DendroNode",
    "DuplicatePointError",
    "Family",
    "FieldMismatchError",
    "FieldSpec",
    "HiddenReport",
    "INF",
    "IndeterminateError",
    "InputError",
    "MarkedTree",
    "Mobius",
    "PadicDendroError",
    "PadicNumber",
    "ProjPoint",
    "SliceResult",
    "StableTree",
    "Star",
    "ValuationMatrix",
    "VertexDescriptor",
    "build_projective_dendrogram",
    "canonical_form",
    "check_bounds",
    "choose_field",
    "classical_view",
    "collide",
    "contract_edge",
    "cross_ratio",
    "decode_codes",
    "encode_dendrogram",
    "enumerate_labeled",
    "enumerate_shapes",
    "extremal_dendrogram",
    "format_scalar",
    "hidden_report",
    "hidden_subgraph",
    "is_irreducible",
    "labeled_isomorphic",
    "normalize_configuration",
    "normalizing_mobius",
    "order",
    "parse_canonical",
    "parse_scalar",
    "single_linkage_oracle",
    "slice_family",
    "smallest_irreducible",
    "stabilize",
    "star",
    "strata_adjacent",
    "stratum_code",
    "stratum_tree",
    "tips",
    "to_dot",
    "to_newick",
    "tree_from_json",
    "tree_to_json",
    "val",
    "valuation_matrix",
    "validate_stable",
    "vertex_of_triple",
]
