"""Command-line entrypoint: `python -m crossgl <command>`.

  translate INPUT... --target T [-o DIR] [--emit-mode combined|separate] [--strict]
  list-targets                      (also accepted as --list-targets)
  eval FILE FUNCTION [ARG...]       arguments are CrossGL expressions, e.g. vec3(0, 0, 1)
  conformance [DIR] [--report out.jsonl]
  serve                             translation service on CROSSGL_HOST:CROSSGL_PORT

Exit status: 0 success, 1 diagnostics or failed cells, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path
from typing import Sequence

from .backends import BackendRegistry, get_registry
from .config import Settings, configure_logging, load_settings
from .conformance import format_report, run_conformance, write_jsonl
from .corpus import BUNDLED_CORPUS
from .errors import CrossGLError, DiagnosticsError
from .frontends import SourceLanguage
from .interpreter import eval_function, format_value, parse_value
from .pipeline import load_files
from .translate import EXIT_DIAGNOSTICS, EXIT_OK, EXIT_USAGE, EmitMode, TranslateRequest, run_translate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossgl", description="Universal shader transpiler.")
    parser.add_argument("--list-targets", action="store_true", help="print registered targets and exit")
    sub = parser.add_subparsers(dest="command")

    tr = sub.add_parser("translate", help="translate source files to a target language")
    tr.add_argument("inputs", nargs="+", type=Path)
    tr.add_argument("-t", "--target", required=True)
    tr.add_argument("-o", "--output-dir", type=Path, default=Path("."))
    tr.add_argument("--source-language", choices=[s.value for s in SourceLanguage])
    tr.add_argument("--emit-mode", choices=[m.value for m in EmitMode], default=EmitMode.COMBINED.value)
    tr.add_argument("--strict", action="store_true", help="treat warnings as failures")

    sub.add_parser("list-targets", help="print registered targets")

    ev = sub.add_parser("eval", help="evaluate a function with the reference interpreter")
    ev.add_argument("file", type=Path)
    ev.add_argument("function")
    ev.add_argument("args", nargs="*")
    ev.add_argument("--uniform", action="append", default=[], metavar="NAME=VALUE")

    cf = sub.add_parser("conformance", help="run every corpus program through every target")
    cf.add_argument("corpus_dir", nargs="?", type=Path, default=BUNDLED_CORPUS)
    cf.add_argument("--report", type=Path, help="write JSON-lines cell records here")
    cf.add_argument("--workers", type=int, help="parallel cells (default: CROSSGL_WORKERS)")

    sub.add_parser("serve", help="run the translation service")
    return parser


def _list_targets(registry: BackendRegistry) -> int:
    for backend in registry:
        print(backend.describe())
    return EXIT_OK


def _translate(args: argparse.Namespace, registry: BackendRegistry) -> int:
    request = TranslateRequest(
        inputs=args.inputs,
        target=args.target,
        output_dir=args.output_dir,
        source_language=args.source_language,
        emit_mode=args.emit_mode,
        strict=args.strict,
    )
    outcome = run_translate(request, registry=registry)
    for line in outcome.messages:
        print(line, file=sys.stderr)
    for path in outcome.written:
        print(path)
    return outcome.exit_code


def _eval(args: argparse.Namespace) -> int:
    uniforms = {}
    for item in args.uniform:
        name, sep, text = item.partition("=")
        if not sep:
            print(f"error: --uniform expects NAME=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        uniforms[name.strip()] = text
    if not args.file.is_file():
        print(f"error: cannot read {args.file}", file=sys.stderr)
        return EXIT_USAGE
    try:
        program = load_files([args.file])
        values = [parse_value(a)[0] for a in args.args]
        bound = {name: parse_value(text)[0] for name, text in uniforms.items()}
        result = eval_function(program.module, args.function, values, uniforms=bound, check_types=True)
    except DiagnosticsError as exc:
        for d in exc.diagnostics:
            print(d.format(), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except CrossGLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    print(format_value(result))
    return EXIT_OK


def _conformance(args: argparse.Namespace, settings: Settings, registry: BackendRegistry) -> int:
    if not args.corpus_dir.is_dir():
        print(f"error: {args.corpus_dir} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    report = run_conformance(args.corpus_dir, registry=registry, workers=args.workers or settings.workers)
    sys.stdout.write(format_report(report, color=settings.color))
    if args.report is not None:
        write_jsonl(report, args.report)
    return EXIT_OK if report.ok else EXIT_DIAGNOSTICS


def _serve(settings: Settings) -> int:
    import uvicorn

    uvicorn.run(
        "crossgl.server:create_app",
        factory=True,
        host=settings.host,
        port=settings.port,
        log_level=settings.log_level,
    )
    return EXIT_OK


def main(argv: Sequence[str] | None = None, *, registry: BackendRegistry | None = None) -> int:
    settings = load_settings()
    configure_logging(settings)
    parser = build_parser()
    args = parser.parse_args(argv)
    registry = registry if registry is not None else get_registry()

    try:
        if args.list_targets or args.command == "list-targets":
            return _list_targets(registry)
        if args.command == "translate":
            return _translate(args, registry)
        if args.command == "eval":
            return _eval(args)
        if args.command == "conformance":
            return _conformance(args, settings, registry)
        if args.command == "serve":
            return _serve(settings)
    except Exception as exc:  # noqa: BLE001
        if settings.debug:
            traceback.print_exc()
        print(f"error: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    parser.print_usage(sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
