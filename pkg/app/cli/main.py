"""
Command-line surface.

Machine-readable output goes to stdout, diagnostics to stderr. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from app.algorithms.service import algorithms_service
from app.config import settings
from app.core.schemas import Instance, Side
from app.core.service import core_service
from app.harness.schemas import ExperimentConfig
from app.harness.service import harness_service
from app.oracle.service import oracle_service
from app.prefgen.schemas import ModelDescriptor, ModelName, RANDOMIZED_MODELS
from app.prefgen.service import prefgen_service
from app.shared.errors import InvalidInstanceError, MatchLabError
from app.shared.io import dump_json, read_json, read_raw_json, write_json
from app.shared.log import configure_logging

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_params(pairs: Optional[Sequence[str]]) -> dict[str, Any]:
    """k=v pairs; values are read as JSON when they parse, else kept as strings."""
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--params expects key=value, got '{pair}'")
        params[key] = _parse_value(value)
    return params


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        target = Path(output)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str) -> Instance:
    return read_json(path, Instance)


# ---------------------------------------------------------
# Subcommands
# ---------------------------------------------------------
def cmd_gen(args: argparse.Namespace) -> int:
    M = args.m if args.m is not None else args.n
    W = args.w if args.w is not None else args.n
    if M is None or W is None:
        raise UsageError("give --n, or both --m and --w")
    model = ModelName(args.model)
    if model in RANDOMIZED_MODELS and args.seed is None:
        raise UsageError(f"model '{model.value}' is randomized; pass --seed")

    descriptor = ModelDescriptor(
        model=model, params=parse_params(args.params), M=M, W=W, seed=args.seed, trial=args.trial,
    )
    built = prefgen_service.generate(descriptor)
    output = Path(args.output)
    write_json(output, built.instance)
    write_json(output.with_suffix(".model.json"), built.descriptor)
    sys.stdout.write(dump_json(built.descriptor))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    side = Side.MAN if args.side == "men" else Side.WOMAN
    _emit(dump_json(algorithms_service.solve(inst, side)), args.output)
    if args.trace:
        entries = [entry.model_dump(mode="json") for entry in algorithms_service.trace(inst)]
        Path(args.trace).write_text(json.dumps(entries) + "\n")
    return 0


def _weights_from_file(path: str) -> dict[int, float]:
    raw = read_raw_json(path)
    if isinstance(raw, list):
        return {i: float(v) for i, v in enumerate(raw) if v is not None}
    if isinstance(raw, dict):
        try:
            return {int(k): float(v) for k, v in raw.items()}
        except (TypeError, ValueError):
            raise InvalidInstanceError(f"Weights in {path} must map man indices to numbers")
    raise InvalidInstanceError(f"Weights in {path} must be a list or an object")


def cmd_enumerate(args: argparse.Namespace) -> int:
    inst = _load_instance(args.file)
    weights = None
    if args.weights:
        if args.seed is None:
            raise UsageError("--weights draws her list at random; pass --seed")
        weights = _weights_from_file(args.weights)
    result = algorithms_service.husbands(inst, args.woman, weights, args.seed)
    _emit(dump_json(result), args.output)
    return 0


def cmd_blocks(args: argparse.Namespace) -> int:
    _emit(dump_json(algorithms_service.blocks(_load_instance(args.file))), args.output)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    export = oracle_service.stable_set(_load_instance(args.file), args.guard)
    _emit(dump_json(export), args.output)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.list:
        for info in harness_service.catalog():
            sys.stdout.write(f"{info.name}\t{info.description}\n")
        return 0

    if args.config:
        cfg = read_json(args.config, ExperimentConfig)
    elif args.name is None or args.seed is None:
        raise UsageError("experiment needs --config, or --name and --seed")
    else:
        cfg = ExperimentConfig(name=args.name, seed=args.seed)

    overrides = {
        "name": args.name, "seed": args.seed, "n": args.n, "trials": args.trials,
        "guard": args.guard, "workers": args.workers, "output": args.output,
    }
    update = {k: v for k, v in overrides.items() if v is not None}
    if args.params:
        update["params"] = {**cfg.params, **parse_params(args.params)}
    cfg = ExperimentConfig.model_validate({**cfg.model_dump(), **update})
    if cfg.output is None:
        cfg = cfg.model_copy(update={"output": str(Path(settings.output_dir) / f"{cfg.name}.csv")})
    logger.debug(f"Experiment config: {cfg.model_dump_json()}")

    report = harness_service.run(cfg)
    sys.stdout.write(report.model_dump_json(exclude={"rows"}) + "\n")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    report = core_service.validate(read_json(args.file, Instance))
    sys.stdout.write(dump_json(report))
    return 0 if report.ok else 1


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port, log_level="info", reload=settings.debug)
    return 0


# ---------------------------------------------------------
# Parser
# ---------------------------------------------------------
def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchlab", description="Stable matching simulation lab.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--log-level", default=None, help=f"default {settings.log_level}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance from a preference model")
    gen.add_argument("--model", required=True, choices=[m.value for m in ModelName])
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--w", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--trial", type=int, default=0)
    gen.add_argument("--params", nargs="*", metavar="K=V")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(handler=cmd_gen)

    solve_p = sub.add_parser("solve", help="man- or woman-optimal stable matching")
    solve_p.add_argument("file")
    solve_p.add_argument("--side", choices=["men", "women"], default="men")
    solve_p.add_argument("--trace", help="also write the men-proposing trace to this file")
    solve_p.add_argument("-o", "--output")
    solve_p.set_defaults(handler=cmd_solve)

    enum = sub.add_parser("enumerate", help="stable husbands of one woman")
    enum.add_argument("file")
    enum.add_argument("--woman", type=int, required=True)
    enum.add_argument("--weights")
    enum.add_argument("--seed", type=int)
    enum.add_argument("-o", "--output")
    enum.set_defaults(handler=cmd_enumerate)

    blocks = sub.add_parser("blocks", help="block decomposition of the man-optimal matching")
    blocks.add_argument("file")
    blocks.add_argument("-o", "--output")
    blocks.set_defaults(handler=cmd_blocks)

    oracle = sub.add_parser("oracle", help="all stable matchings by exhaustive search")
    oracle.add_argument("file")
    oracle.add_argument("--guard", type=int)
    oracle.add_argument("-o", "--output")
    oracle.set_defaults(handler=cmd_oracle)

    exp = sub.add_parser("experiment", help="run a named Monte Carlo experiment")
    exp.add_argument("--config")
    exp.add_argument("--name")
    exp.add_argument("--list", action="store_true")
    exp.add_argument("--n", type=int, nargs="+")
    exp.add_argument("--trials", type=int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--guard", type=int)
    exp.add_argument("--workers", type=int)
    exp.add_argument("--params", nargs="*", metavar="K=V")
    exp.add_argument("-o", "--output")
    exp.set_defaults(handler=cmd_experiment)

    validate = sub.add_parser("validate", help="check an instance file")
    validate.add_argument("file")
    validate.set_defaults(handler=cmd_validate)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host", default=settings.api_host)
    serve.add_argument("--port", type=int, default=settings.api_port)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level, args.verbose)
    try:
        return args.handler(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"matchlab: error: {e}\n")
        return 2
    except ValidationError as e:
        sys.stderr.write(f"error: invalid input\n{e}\n")
        return 1
    except MatchLabError as e:
        sys.stderr.write(f"error: {e.message}\n")
        if e.details:
            sys.stderr.write(f"{e.details}\n")
        return 1
