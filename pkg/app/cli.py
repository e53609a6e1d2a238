"""
uimlc command line: validate, lower, render, simulate.

Exit codes: 0 success, 1 diagnostics or runtime failure, 2 usage error
(bad arguments, missing input file, empty family list).
"""
import argparse
import logging
import os
import sys
from typing import Callable, List, Optional, Sequence

from app import __version__
from app.config import settings
from app.core.errors import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    DiagnosticsError,
    UimlError,
)
from app.schemas.behavior_schema import render_trace
from app.schemas.diagnostic_schema import Diagnostic
from app.schemas.vocabulary_schema import FamilyId
from app.services.behavior_service import load_events
from app.services.logical_service import load_logical
from app.services.pipeline_service import pipeline_service
from app.services.source_service import read_source
from app.services.transform_service import load_hints
from app.services.vocabulary_service import load_vocabulary

logger = logging.getLogger(__name__)

_COLORS = {"error": "\033[31m", "warning": "\033[33m"}
_RESET = "\033[0m"


class UsageError(Exception):
    pass


def print_diagnostics(diagnostics: Sequence[Diagnostic], source: str) -> None:
    for diagnostic in diagnostics:
        line = diagnostic.format(source)
        if settings.color:
            line = f"{_COLORS[diagnostic.severity.value]}{line}{_RESET}"
        print(line, file=sys.stderr)


def _existing(path: Optional[str], what: str) -> Optional[str]:
    if path is not None and not os.path.isfile(path):
        raise UsageError(f"{what} file not found: {path}")
    return path


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _vocab(args):
    return load_vocabulary(args.vocab) if args.vocab else None


def cmd_validate(args) -> int:
    _existing(args.input, "input")
    _existing(args.vocab, "vocabulary")
    _, warnings = pipeline_service.check(read_source(args.input), args.input, _vocab(args))
    print_diagnostics(warnings, args.input)
    return EXIT_OK


def cmd_lower(args) -> int:
    _existing(args.input, "logical model")
    uiml = pipeline_service.lower(load_logical(args.input))
    os.makedirs(args.out, exist_ok=True)
    target = os.path.join(args.out, _stem(args.input) + ".uiml")
    with open(target, "w", encoding="utf-8") as f:
        f.write(uiml)
    logger.info(f"Wrote {target}")
    return EXIT_OK


def cmd_render(args) -> int:
    if not args.family:
        raise UsageError("render needs at least one --family")
    _existing(args.input, "input")
    _existing(args.hints, "hints")
    _existing(args.vocab, "vocabulary")
    hints = load_hints(args.hints) if args.hints else None
    rendered = pipeline_service.render(
        read_source(args.input), args.family, args.input, hints=hints, vocab=_vocab(args))

    os.makedirs(args.out, exist_ok=True)
    written: List[str] = []
    try:
        for result in rendered:
            markup_name, uiml_name = result.filenames(_stem(args.input))
            for name, text in ((markup_name, result.markup), (uiml_name, result.platform_uiml)):
                path = os.path.join(args.out, name)
                with open(path, "w", encoding="utf-8") as f:
                    written.append(path)
                    f.write(text)
    except OSError:
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        raise
    logger.info(f"Wrote {len(written)} file(s) to {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    _existing(args.input, "input")
    _existing(args.events, "events")
    _existing(args.vocab, "vocabulary")
    events = load_events(args.events) if args.events else []
    trace = pipeline_service.simulate(read_source(args.input), events, args.input, vocab=_vocab(args))
    sys.stdout.write(render_trace(trace))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uimlc", description="Compile UIML into platform markup.")
    parser.add_argument("--version", action="version", version=f"uimlc {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="parse and validate a UIML document")
    validate.add_argument("input", help="UIML source file")
    validate.add_argument("--vocab", help="vocabulary JSON file (default: built-in generic)")
    validate.set_defaults(handler=cmd_validate)

    lower = commands.add_parser("lower", help="lower a logical model to generic UIML")
    lower.add_argument("input", help="logical model JSON file")
    lower.add_argument("--out", default=".", help="output directory")
    lower.set_defaults(handler=cmd_lower)

    render = commands.add_parser("render", help="compile to markup for one or more families")
    render.add_argument("input", help="generic UIML source file")
    render.add_argument("--family", action="append", default=[],
                        choices=[f.value for f in FamilyId], help="target family (repeatable)")
    render.add_argument("--hints", help="external mapping hints JSON file")
    render.add_argument("--vocab", help="vocabulary JSON file for validation")
    render.add_argument("--out", default=".", help="output directory")
    render.set_defaults(handler=cmd_render)

    simulate = commands.add_parser("simulate", help="run behavior rules against an event script")
    simulate.add_argument("input", help="UIML source file")
    simulate.add_argument("--events", help="events JSON file (default: no events)")
    simulate.add_argument("--vocab", help="vocabulary JSON file")
    simulate.set_defaults(handler=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    handler: Callable = args.handler
    try:
        return handler(args)
    except UsageError as e:
        print(f"uimlc: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DiagnosticsError as e:
        print_diagnostics(e.diagnostics, args.input)
        return EXIT_FAILURE
    except UimlError as e:
        print(f"uimlc: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        print(f"uimlc: {e}", file=sys.stderr)
        return EXIT_FAILURE
