"""
Command-line surface: validation, both pipelines, the BV tables and the
check suite.

Exit codes: 0 success, 1 validation or verification failure, 2 usage
error (bad flags, degree out of range, unusable pipeline, unreadable
model file).
"""

import argparse
import logging
import sys
from typing import List, Optional

from services.cdga import ensure_valid
from services.exceptions import (
    ChainIdentityError,
    ModelLoadError,
    ModelValidationError,
    PipelineError,
    RangeError,
    UnknownModelError,
)
from services.model_service import ModelPair, model_service
from services.rendering import (
    FORMATS,
    PIPELINES,
    betti_payload,
    check_payload,
    hodge_payload,
    loop_payload,
    render,
    validation_payload,
)
from services.stringtop import loop_algebra
from services.sullivan import build_free_loop_model, hodge_table
from services.verification import run_checks

logger = logging.getLogger("loopbv.cli")


def _source(args: argparse.Namespace) -> ModelPair:
    if args.builtin:
        return model_service.builtin(args.builtin)
    if args.path:
        return ModelPair.of(model_service.read(args.path))
    raise PipelineError("give a model file or --builtin NAME")


def _degree(args: argparse.Namespace, pair: ModelPair) -> int:
    N = pair.default_degree if args.max_degree is None else args.max_degree
    if N < 0:
        raise RangeError("the degree bound must be nonnegative", N)
    return N


def _valid(pair: ModelPair) -> ModelPair:
    for model in (pair.pd, pair.sullivan):
        if model is not None:
            ensure_valid(model)
    return pair


def cmd_validate(args: argparse.Namespace) -> int:
    pair = _source(args)
    payloads = [validation_payload(m) for m in (pair.pd, pair.sullivan) if m is not None]
    if args.format == "json":
        print(render("validate", payloads, "json"))
    else:
        print("\n\n".join(render("validate", p, args.format) for p in payloads))
    return 0 if all(p["valid"] for p in payloads) else 1


def cmd_betti(args: argparse.Namespace) -> int:
    pair = _valid(_source(args))
    N = _degree(args, pair)
    payload = betti_payload(pair, N, args.pipeline)
    print(render("betti", payload, args.format))
    if payload["pipeline"] == "both" and not all(row["match"] for row in payload["rows"]):
        return 1
    return 0


def cmd_loop(args: argparse.Namespace) -> int:
    pair = _valid(_source(args))
    if pair.pd is None:
        raise PipelineError("loop tables need a pd-cdga model")
    N = _degree(args, pair)
    print(render("loop", loop_payload(loop_algebra(pair.pd, N)), args.format))
    return 0


def cmd_hodge(args: argparse.Namespace) -> int:
    pair = _valid(_source(args))
    if pair.sullivan is None:
        raise PipelineError("the Hodge table needs a Sullivan model")
    N = _degree(args, pair)
    table = hodge_table(build_free_loop_model(pair.sullivan, N), N)
    print(render("hodge", hodge_payload(pair.sullivan.name, table), args.format))
    return 0 if table.consistent else 1


def cmd_check(args: argparse.Namespace) -> int:
    pair = _source(args)
    N = _degree(args, pair)
    reports = run_checks(pair, N, args.seed)
    payload = check_payload(pair.name, N, reports)
    print(render("check", payload, args.format))
    if not payload["passed"]:
        first = next(r for r in reports if not r.passed).first_failure
        print(f"first failing identity: {first}", file=sys.stderr)
        return 1
    return 0


def cmd_export_builtins(args: argparse.Namespace) -> int:
    for path in model_service.export_builtins(args.directory):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopbv",
        description="Exact rational string topology: loop homology BV algebras and Hodge decompositions.",
    )
    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument("path", nargs="?", help="model file (JSON)")
    group.add_argument("--builtin", metavar="NAME", help=f"builtin model: {', '.join(model_service.builtin_names())}")
    source.add_argument("-N", "--max-degree", type=int, default=None, help="degree bound N (default m + 10, or 10)")
    source.add_argument("--format", choices=FORMATS, default="table")
    source.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("validate", parents=[source], help="validate a model").set_defaults(handler=cmd_validate)
    betti = commands.add_parser("betti", parents=[source], help="dim H^n(LM) for n ≤ N")
    betti.add_argument("--pipeline", choices=PIPELINES, default=None)
    betti.set_defaults(handler=cmd_betti)
    commands.add_parser("loop", parents=[source], help="loop product, Δ and bracket tables").set_defaults(
        handler=cmd_loop
    )
    commands.add_parser("hodge", parents=[source], help="Hodge table of the free loop model").set_defaults(
        handler=cmd_hodge
    )
    commands.add_parser("check", parents=[source], help="run the full verification suite").set_defaults(
        handler=cmd_check
    )
    export = commands.add_parser("export-builtins", help="write every builtin as model files")
    export.add_argument("directory")
    export.set_defaults(handler=cmd_export_builtins)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ModelValidationError, ChainIdentityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (RangeError, PipelineError, ModelLoadError, UnknownModelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
