"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data/validation/IO error,
3 verification hard failure (implementation disagrees with its oracle).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import (
    SchemaError,
    ValidationError,
    fixture_paths,
    load_csv,
    load_schema,
    load_unlabeled_csv,
)
from .evaluate import accuracy
from .metrics import score_all
from .rules import extract_rules, render_rules, rules_to_json
from .tree import (
    Criterion,
    Internal,
    TreeConfig,
    id3_build,
    load_model,
    predict,
    save_model,
    to_dot,
    tree_stats,
)
from .verify import verify_published

__all__ = ["main", "entrypoint"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_data_args(parser):
    parser.add_argument(
        "--data",
        metavar="CSV",
        help="dataset CSV (default: bundled students.csv, GRADETREE_DATA_DIR honored)",
    )
    parser.add_argument(
        "--schema",
        metavar="JSON",
        help="schema sidecar (default: bundled students.schema.json)",
    )


def _add_output_args(parser):
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gradetree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="build a tree and save it as JSON")
    _add_data_args(p)
    p.add_argument("--criterion", choices=("gain", "gain-ratio"), default="gain")
    p.add_argument("--min-support", type=int, default=0, metavar="N",
                   help="collapse subtrees routed fewer than N records")
    p.add_argument("--max-depth", type=int, default=None, metavar="N")
    p.add_argument("--out", metavar="PATH", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict",
                       help="classify unlabeled CSV rows with a saved model")
    p.add_argument("--model", metavar="JSON", required=True)
    p.add_argument("--data", metavar="CSV", required=True,
                   help="input rows without the class column")
    p.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("rules",
                       help="extract IF-THEN rules from a saved model")
    p.add_argument("--model", metavar="JSON", required=True)
    _add_data_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("gains",
                       help="score every attribute: gain, split information, gain ratio")
    _add_data_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_gains)

    p = sub.add_parser("verify",
                       help="audit the published tables against a recomputation")
    _add_data_args(p)
    _add_output_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot",
                       help="render a saved model as a Graphviz digraph")
    p.add_argument("--model", metavar="JSON", required=True)
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.set_defaults(func=cmd_export_dot)

    return parser


def _load_dataset(args):
    default_csv, default_schema = fixture_paths()
    schema = load_schema(args.schema if args.schema else default_schema)
    return load_csv(args.data if args.data else default_csv, schema)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_train(args) -> int:
    dataset = _load_dataset(args)
    config = TreeConfig(
        criterion=Criterion(args.criterion),
        min_leaf_support=args.min_support,
        max_depth=args.max_depth,
    )
    tree = id3_build(dataset, config)
    save_model(tree, args.out)
    stats = tree_stats(tree)
    if isinstance(tree.root, Internal):
        root_line = f"root attribute: {tree.root.attribute}"
    else:
        root_line = f"tree is a single leaf predicting {tree.root.label!r}"
    acc = accuracy(tree, dataset)
    print(f"trained on {len(dataset)} records (criterion={args.criterion}, "
          f"min_support={args.min_support})")
    print(root_line)
    print(f"leaves={stats.leaves} nodes={stats.nodes} depth={stats.depth}")
    print(f"training accuracy: {acc:.3f}")
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    tree = load_model(args.model)
    rows = load_unlabeled_csv(args.data, tree.schema)
    names = list(tree.schema.attribute_names)
    out_lines = [",".join(names + [tree.schema.class_name, "confidence"])]
    for row in rows:
        label, dist = predict(tree, row)
        confidence = dist.counts[label] / dist.total if dist.total else 0.0
        out_lines.append(",".join([row[n] for n in names] + [label, f"{confidence:.4f}"]))
    _emit("\n".join(out_lines) + "\n", args.out)
    return 0


def cmd_rules(args) -> int:
    tree = load_model(args.model)
    dataset = _load_dataset(args)
    rules = extract_rules(tree, dataset)
    if args.format == "json":
        _emit(rules_to_json(rules, tree.schema.class_name), args.out)
    else:
        _emit(render_rules(rules, tree.schema.class_name), args.out)
    return 0


def cmd_gains(args) -> int:
    dataset = _load_dataset(args)
    scores = score_all(dataset)
    if args.format == "json":
        doc = [
            {
                "attribute": s.attribute,
                "gain": s.gain,
                "split_information": s.split_information,
                "gain_ratio": s.gain_ratio,
            }
            for s in scores
        ]
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = [f"{'attribute':<12}{'gain':>12}{'split_info':>14}{'gain_ratio':>14}"]
        for s in scores:
            lines.append(
                f"{s.attribute:<12}{s.gain:>12.6f}{s.split_information:>14.6f}"
                f"{s.gain_ratio:>14.6f}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    dataset = _load_dataset(args)
    report = verify_published(dataset)
    if args.format == "json":
        _emit(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
    else:
        _emit(report.render(), args.out)
    if not report.implementation_consistent:
        print("verification hard failure: implementation disagrees with oracle",
              file=sys.stderr)
        return 3
    return 0


def cmd_export_dot(args) -> int:
    tree = load_model(args.model)
    _emit(to_dot(tree), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ValidationError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
