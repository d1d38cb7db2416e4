"""Command-line entry point: analyze, query, and serve.

Diagnostics never fail a run (analysis is fully automated); only I/O and
argument errors produce nonzero exit codes.
"""

from __future__ import annotations

import argparse
import errno
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .conditions import Configuration
from .diagnostics import DiagnosticSink
from .extractor import extract_entities
from .layout import compute_layout, save_layout
from .model import (
    MalformedModelFile,
    SchemaVersionMismatch,
    UnknownFeature,
    VariabilityModel,
    build_model,
    diff_configurations,
    evaluate_configuration,
    feature_impact,
    load_model,
    save_model,
)
from .scanner import ScanOptions, scan_unit
from .server import make_server


def analyze_directory(
    input_root: Path,
    include_paths: list[Path] | None = None,
    predefines: list[str] | None = None,
    include_mode: str = "project-only",
    diagnostics: DiagnosticSink | None = None,
) -> VariabilityModel:
    """Scan every `.c` unit under input_root and assemble the model."""
    sink = diagnostics if diagnostics is not None else DiagnosticSink()
    options = ScanOptions(
        search_paths=[Path(p) for p in (include_paths or [])],
        predefines=list(predefines or []),
        include_mode=include_mode,
    )
    units = sorted(input_root.rglob("*.c"))
    extractions = [
        extract_entities(scan_unit(unit, input_root, options, DiagnosticSink()))
        for unit in units
    ]
    meta = {
        "tool": "varscope",
        "version": __version__,
        "input_root": str(input_root),
        "timestamp": _tree_timestamp(input_root),
    }
    return build_model(extractions, meta, sink)


def _tree_timestamp(root: Path) -> str:
    """Newest modification time under the tree; deterministic for an
    unchanged tree, unlike wall-clock time."""
    newest = 0.0
    for path in root.rglob("*"):
        if path.is_file():
            newest = max(newest, path.stat().st_mtime)
    return datetime.fromtimestamp(newest, tz=timezone.utc).isoformat()


def _config_from_flags(names: list[str]) -> Configuration:
    return Configuration.enabling(names)


def _load_model_or_exit(path: str) -> VariabilityModel:
    try:
        return load_model(path)
    except (MalformedModelFile, SchemaVersionMismatch) as exc:
        print(f"error: cannot load model: {exc}", file=sys.stderr)
        raise SystemExit(2)


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> int:
    input_root = Path(args.input)
    if not input_root.is_dir():
        print(f"error: input not found: {input_root}", file=sys.stderr)
        return 2
    output_dir = Path(args.output or os.environ.get("VARSCOPE_OUTPUT", "varscope-out"))
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 2
    sink = DiagnosticSink()
    model = analyze_directory(
        input_root,
        include_paths=[Path(p) for p in args.include or []],
        predefines=args.define or [],
        include_mode=args.include_mode,
        diagnostics=sink,
    )
    save_model(model, output_dir / "model.json")
    save_layout(compute_layout(model), output_dir / "layout.json")
    for diagnostic in model.diagnostics:
        print(diagnostic.format(), file=sys.stderr)
    print(
        f"analyzed {sum(1 for e in model.entities.values() if e.kind == 'TranslationUnit')}"
        f" translation units, {len(model.entities)} entities,"
        f" {len(model.features)} features -> {output_dir}"
    )
    return 0


def cmd_features(args) -> int:
    model = _load_model_or_exit(args.model)
    for feature in model.features:
        print(feature)
    return 0


def cmd_eval(args) -> int:
    model = _load_model_or_exit(args.model)
    sink = DiagnosticSink()
    inclusion = evaluate_configuration(model, _config_from_flags(args.enable or []), sink)
    for diagnostic in sink.items:
        print(diagnostic.format(), file=sys.stderr)
    included = sorted(k for k, ok in inclusion.status.items() if ok)
    excluded = sorted(k for k, ok in inclusion.status.items() if not ok)
    print(f"included {len(included)} / excluded {len(excluded)}")
    if args.list:
        for entity_id in included:
            print(f"+ {entity_id}")
        for entity_id in excluded:
            print(f"- {entity_id}")
    return 0


def cmd_diff(args) -> int:
    model = _load_model_or_exit(args.model)
    diff = diff_configurations(
        model, _config_from_flags(args.a or []), _config_from_flags(args.b or [])
    )
    print(f"only in A ({len(diff.only_in_a)}):")
    for entity_id in sorted(diff.only_in_a):
        print(f"  {entity_id}")
    print(f"only in B ({len(diff.only_in_b)}):")
    for entity_id in sorted(diff.only_in_b):
        print(f"  {entity_id}")
    print(f"in both ({len(diff.in_both)}):")
    for entity_id in sorted(diff.in_both):
        print(f"  {entity_id}")
    return 0


def cmd_impact(args) -> int:
    model = _load_model_or_exit(args.model)
    try:
        impact = feature_impact(model, args.feature)
    except UnknownFeature:
        print(f"error: unknown feature {args.feature!r}", file=sys.stderr)
        return 1
    total_units = sum(1 for e in model.entities.values() if e.kind == "TranslationUnit")
    affected = len(impact.translation_units)
    share = 100.0 * affected / total_units if total_units else 0.0
    print(f"{affected} / {total_units} ({share:.1f}%)")
    for entity_id in sorted(impact.entities):
        print(entity_id)
    return 0


def cmd_serve(args) -> int:
    output_dir = Path(args.output_dir)
    if not (output_dir / "model.json").is_file():
        print(f"error: {output_dir}/model.json not found; run analyze first", file=sys.stderr)
        return 2
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    try:
        server = make_server(output_dir, args.port, ui_dir)
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
            return 2
        raise
    host, port = server.server_address[:2]
    print(f"serving {output_dir} at http://{host}:{port}/ (Ctrl+C stops)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varscope",
        description="Analyze C preprocessor variability and explore feature configurations.",
    )
    parser.add_argument("--version", action="version", version=f"varscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="scan sources, write model.json and layout.json")
    analyze.add_argument("input", help="directory of .c/.h sources")
    analyze.add_argument("-I", dest="include", action="append", metavar="DIR",
                         help="include search path (repeatable)")
    analyze.add_argument("-D", dest="define", action="append", metavar="NAME[=VALUE]",
                         help="predefine a macro (repeatable)")
    analyze.add_argument("--include-mode", choices=["project-only", "full"],
                         default="project-only",
                         help="system-header policy (default: project-only)")
    analyze.add_argument("-o", "--output", metavar="DIR",
                         help="output directory (default: $VARSCOPE_OUTPUT or ./varscope-out)")
    analyze.set_defaults(func=cmd_analyze)

    features = sub.add_parser("features", help="list the model's feature flags")
    features.add_argument("model", help="path to model.json")
    features.set_defaults(func=cmd_features)

    evaluate = sub.add_parser("eval", help="evaluate a configuration")
    evaluate.add_argument("model")
    evaluate.add_argument("--enable", action="append", metavar="FEATURE",
                          help="enable a feature (repeatable; others disabled)")
    evaluate.add_argument("--list", action="store_true", help="list entity ids by status")
    evaluate.set_defaults(func=cmd_eval)

    diff = sub.add_parser("diff", help="compare two configurations")
    diff.add_argument("model")
    diff.add_argument("--a", action="append", metavar="FEATURE", help="enabled in A")
    diff.add_argument("--b", action="append", metavar="FEATURE", help="enabled in B")
    diff.set_defaults(func=cmd_diff)

    impact = sub.add_parser("impact", help="report a feature's reach")
    impact.add_argument("model")
    impact.add_argument("feature")
    impact.set_defaults(func=cmd_impact)

    serve = sub.add_parser("serve", help="serve model, layout, sources, and UI over HTTP")
    serve.add_argument("output_dir", help="directory holding model.json and layout.json")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui-dir", help="directory of built UI assets (default: OUTPUT/ui)")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    raise SystemExit(main())
