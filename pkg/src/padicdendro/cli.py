"""Batch command-line front end.

Subcommands wire file ingestion to the library and emit versioned JSON,
Newick, DOT or CSV.  Exit codes: 0 success, 2 invalid input, 3
precision-indeterminate, 4 residue field too small (the error names the
sufficient degree).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .builder import build_projective_dendrogram
from .encoder import (
    ClassicalDendrogram,
    CodeAssignment,
    choose_field,
    decode_codes,
    encode_dendrogram,
)
from .errors import BranchingError, IndeterminateError, InputError, PadicDendroError
from .fields import FieldSpec
from .hidden import (
    DEFAULT_ENUMERATION_CAP,
    enumerate_labeled,
    enumerate_shapes,
    extremal_dendrogram,
    hidden_report,
)
from .mobius import Mobius
from .moduli import (
    Configuration,
    Family,
    StableTree,
    collide,
    normalize_configuration,
    slice_family,
    strata_adjacent,
    stratum_code,
    validate_stable,
)
from .padic import format_scalar, parse_scalar
from .tree import canonical_form, to_dot, to_newick, tree_from_json, tree_to_json

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INDETERMINATE = 3
EXIT_FIELD_TOO_SMALL = 4


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _write_output(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _parse_config_file(path: str) -> dict[str, str]:
    """TOML-like flat 'key = value' file; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip().strip('"')
    return out


def _field_from(args) -> FieldSpec:
    return FieldSpec(args.p, args.m, precision=args.precision)


def _parse_points(text: str, field: FieldSpec):
    points = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        points.append(parse_scalar(line, field))
    if not points:
        raise InputError("points file contains no points")
    return points


def _mobius_doc(mob: Mobius) -> dict:
    return {
        "a": format_scalar(mob.a),
        "b": format_scalar(mob.b),
        "c": format_scalar(mob.c),
        "d": format_scalar(mob.d),
    }


def _emit_tree(tree, fmt: str, output):
    if fmt == "json":
        _write_output(tree_to_json(tree), output)
    elif fmt == "newick":
        _write_output(to_newick(tree) + "\n", output)
    elif fmt == "dot":
        _write_output(to_dot(tree), output)
    else:
        raise InputError(f"unsupported tree format {fmt!r}")


def _json_doc(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- subcommand handlers --


def _cmd_tree(args) -> int:
    field = _field_from(args)
    points = _parse_points(_read_text(args.points), field)
    tree = build_projective_dendrogram(points, normalize=not args.no_normalize)
    _emit_tree(tree, args.out, args.output)
    return EXIT_OK


def _cmd_encode(args) -> int:
    text = _read_text(args.dendrogram)
    if args.in_format == "newick":
        dendro = ClassicalDendrogram.from_newick(text)
    else:
        dendro = ClassicalDendrogram.from_json(text)
    if args.auto_promote:
        field = choose_field(dendro.max_branching(), p=args.p, precision=args.precision)
    else:
        field = _field_from(args)
    assignment = encode_dendrogram(dendro, field)
    _write_output(assignment.to_csv(), args.output)
    return EXIT_OK


def _cmd_decode(args) -> int:
    assignment = CodeAssignment.from_csv(_read_text(args.codes), precision=args.precision)
    dendro = decode_codes(assignment)
    if args.out == "newick":
        _write_output(dendro.to_newick() + "\n", args.output)
    else:
        _write_output(dendro.to_json(), args.output)
    return EXIT_OK


def _cmd_hidden(args) -> int:
    tree = tree_from_json(_read_text(args.tree))
    report = hidden_report(tree, on_classical_view=args.classical)
    _write_output(report.to_json(), args.output)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    if args.labeled:
        trees = enumerate_labeled(args.n)
        forms = sorted(
            canonical_form(t, labeled=True, lengths=False) for t in trees
        )
    else:
        trees = enumerate_shapes(args.n, cap=args.cap)
        forms = sorted(
            canonical_form(t, labeled=False, lengths=False) for t in trees
        )
    if args.count_only:
        _write_output(f"{len(forms)}\n", args.output)
    else:
        _write_output("".join(f"{form}\n" for form in forms), args.output)
    return EXIT_OK


def _cmd_extremal(args) -> int:
    import warnings

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tree = extremal_dendrogram(args.n)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit_tree(tree, args.out, args.output)
    print(hidden_report(tree).summary(), file=sys.stderr)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    field = _field_from(args)
    points = _parse_points(_read_text(args.points), field)
    mob, conf = normalize_configuration(Configuration(points))
    doc = {
        "format_version": 1,
        "type": "normalized_configuration",
        "mobius": _mobius_doc(mob),
        "points": [format_scalar(pt) for pt in conf.points],
    }
    _write_output(_json_doc(doc), args.output)
    return EXIT_OK


def _cmd_stratum(args) -> int:
    field = _field_from(args)
    points = _parse_points(_read_text(args.points), field)
    conf = Configuration(points)
    if not conf.is_normalized():
        _, conf = normalize_configuration(conf)
    code = stratum_code(conf)
    doc = {
        "format_version": 1,
        "type": "stratum_code",
        "n": len(conf),
        "code": code,
    }
    _write_output(_json_doc(doc), args.output)
    return EXIT_OK


def _cmd_adjacent(args) -> int:
    result = strata_adjacent(args.code1, args.code2)
    doc = {"format_version": 1, "type": "strata_adjacency", "adjacent": result}
    _write_output(_json_doc(doc), args.output)
    return EXIT_OK


def _cmd_slice(args) -> int:
    field = _field_from(args)
    family = Family.from_csv(_read_text(args.family), field)
    result = slice_family(family, args.row - 1)
    doc = {
        "format_version": 1,
        "type": "family_slice",
        "row": args.row,
        "mobius": _mobius_doc(result.mobius),
        "duplicates": result.duplicates,
        "tree": json.loads(tree_to_json(result.tree)),
    }
    _write_output(_json_doc(doc), args.output)
    return EXIT_OK


def _cmd_collide(args) -> int:
    field = _field_from(args)
    points = _parse_points(_read_text(args.points), field)
    stable = collide(points)
    if args.out == "dot":
        _write_output(stable.to_dot(), args.output)
    else:
        _write_output(stable.to_json(), args.output)
    return EXIT_OK


def _cmd_validate_stable(args) -> int:
    stable = StableTree.from_json(_read_text(args.stable))
    valid, violations = validate_stable(stable)
    doc = {
        "format_version": 1,
        "type": "stable_tree_validation",
        "valid": valid,
        "violations": violations,
    }
    _write_output(_json_doc(doc), args.output)
    return EXIT_OK


def _add_field_flags(parser, defaults):
    parser.add_argument("--p", type=int, default=int(defaults.get("p", 2)),
                        help="prime of the coefficient field (default 2)")
    parser.add_argument("--m", type=int, default=int(defaults.get("m", 1)),
                        help="residue degree, q = p^m (default 1)")
    parser.add_argument(
        "--precision", type=int, default=int(defaults.get("precision", 64)),
        help="digit cap for truncated results (default 64)"
    )


def _add_output_flag(parser):
    parser.add_argument("--output", default=None, help="write to a file instead of stdout")


def build_parser(defaults: dict[str, str]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padicdendro",
        description="p-adic dendrograms: exact trees, codes, strata and collisions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_out = defaults.get("out", "json")

    p_tree = sub.add_parser("tree", help="points file -> dendrogram")
    p_tree.add_argument("points")
    p_tree.add_argument("--no-normalize", action="store_true",
                        help="build the tree of the points as given")
    p_tree.add_argument("--out", choices=["json", "newick", "dot"], default=default_out)
    _add_field_flags(p_tree, defaults)
    _add_output_flag(p_tree)
    p_tree.set_defaults(func=_cmd_tree)

    p_enc = sub.add_parser("encode", help="classical dendrogram -> leaf codes CSV")
    p_enc.add_argument("dendrogram")
    p_enc.add_argument("--in-format", choices=["json", "newick"], default="json")
    p_enc.add_argument("--auto-promote", action="store_true",
                       help="pick the smallest residue degree that fits the branching")
    _add_field_flags(p_enc, defaults)
    _add_output_flag(p_enc)
    p_enc.set_defaults(func=_cmd_encode)

    p_dec = sub.add_parser("decode", help="codes CSV -> classical dendrogram")
    p_dec.add_argument("codes")
    p_dec.add_argument("--out", choices=["json", "newick"], default=default_out)
    p_dec.add_argument(
        "--precision", type=int, default=int(defaults.get("precision", 64))
    )
    _add_output_flag(p_dec)
    p_dec.set_defaults(func=_cmd_decode)

    p_hid = sub.add_parser("hidden", help="tree JSON -> hidden subgraph report")
    p_hid.add_argument("tree")
    p_hid.add_argument("--classical", action="store_true",
                       help="analyze the classical view (infinity end removed)")
    _add_output_flag(p_hid)
    p_hid.set_defaults(func=_cmd_hidden)

    p_enum = sub.add_parser("enumerate", help="all dendrogram shapes with n ends")
    p_enum.add_argument("--n", type=int, required=True)
    p_enum.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                        help="safety cap on n (counts grow super-exponentially)")
    p_enum.add_argument("--count-only", action="store_true")
    p_enum.add_argument("--labeled", action="store_true",
                        help="enumerate end-labeled trees instead of shapes")
    _add_output_flag(p_enum)
    p_enum.set_defaults(func=_cmd_enumerate)

    p_ext = sub.add_parser("extremal", help="witness attaining the sharp component bound")
    p_ext.add_argument("--n", type=int, required=True)
    p_ext.add_argument("--out", choices=["json", "newick", "dot"], default=default_out)
    _add_output_flag(p_ext)
    p_ext.set_defaults(func=_cmd_extremal)

    p_norm = sub.add_parser("normalize", help="move the first three points to 0, 1, inf")
    p_norm.add_argument("points")
    _add_field_flags(p_norm, defaults)
    _add_output_flag(p_norm)
    p_norm.set_defaults(func=_cmd_normalize)

    p_strat = sub.add_parser("stratum", help="stratum code of a configuration")
    p_strat.add_argument("points")
    _add_field_flags(p_strat, defaults)
    _add_output_flag(p_strat)
    p_strat.set_defaults(func=_cmd_stratum)

    p_adj = sub.add_parser("adjacent", help="are two stratum codes one contraction apart?")
    p_adj.add_argument("code1")
    p_adj.add_argument("code2")
    _add_output_flag(p_adj)
    p_adj.set_defaults(func=_cmd_adjacent)

    p_slice = sub.add_parser("slice", help="one row of a family CSV -> dendrogram")
    p_slice.add_argument("family")
    p_slice.add_argument("--row", type=int, required=True, help="1-based row index")
    _add_field_flags(p_slice, defaults)
    _add_output_flag(p_slice)
    p_slice.set_defaults(func=_cmd_slice)

    p_col = sub.add_parser("collide", help="points with duplicates -> stable tree")
    p_col.add_argument("points")
    p_col.add_argument("--out", choices=["json", "dot"], default=default_out)
    _add_field_flags(p_col, defaults)
    _add_output_flag(p_col)
    p_col.set_defaults(func=_cmd_collide)

    p_val = sub.add_parser("validate-stable", help="check the four stability properties")
    p_val.add_argument("stable")
    _add_output_flag(p_val)
    p_val.set_defaults(func=_cmd_validate_stable)

    return parser


def run(argv) -> int:
    argv = list(argv)
    defaults: dict[str, str] = {}
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            raise InputError("--config needs a file argument")
        defaults = _parse_config_file(argv[idx + 1])
        del argv[idx : idx + 2]
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    return args.func(args)


def main(argv=None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except BranchingError as exc:
        _report_error(exc, EXIT_FIELD_TOO_SMALL, suggested_m=exc.suggested_m)
        return EXIT_FIELD_TOO_SMALL
    except IndeterminateError as exc:
        _report_error(exc, EXIT_INDETERMINATE)
        return EXIT_INDETERMINATE
    except PadicDendroError as exc:
        _report_error(exc, EXIT_INPUT)
        return EXIT_INPUT


def _report_error(exc, code, **extra):
    doc = {
        "error": {
            "code": code,
            "type": type(exc).__name__,
            "reason": str(exc),
            **extra,
        }
    }
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
