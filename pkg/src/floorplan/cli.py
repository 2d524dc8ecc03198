"""Command-line entry point: ``floorplan solve|validate|encode``.

Exit codes: 0 ok, 1 usage/parse error, 2 infeasible, 3 timeout without a
placement, 4 validation failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import errors
from .clustering import plan_clusters, solve_clustered
from .encoder import MINIMIZE_PRODUCT, emit_smtlib, encode
from .ingest import instance_from_gsrc, parse_gsrc_blocks, parse_native
from .model import Block, BlockKind, Mode, ProblemInstance, Status
from .placement_io import read_placement, write_placement
from .report import emit_table, render_svg
from .config import load_settings
from .solver import BackendConfig, Dialect, Strategy, minimize_area
from .validator import validate

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_TIMEOUT, EXIT_INVALID = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _aspect(text: str) -> tuple[Fraction, Fraction]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected MIN:MAX")
    return _fraction(lo), _fraction(hi)


def _cap(text: str) -> tuple[Fraction, Fraction]:
    c, sep, d = text.lower().partition("x")
    if not sep:
        raise argparse.ArgumentTypeError("expected CxD")
    return _fraction(c), _fraction(d)


def with_mode(instance: ProblemInstance, mode: Mode) -> ProblemInstance:
    """Re-target an instance: case1 pins every block, case2 lets every block turn."""
    if mode is instance.mode:
        return instance
    if mode is Mode.CASE3 or instance.mode is Mode.CASE3:
        raise errors.ModeMismatch(None, f"cannot convert {instance.mode.value} blocks to {mode.value}")
    ctor = Block.hard if mode is Mode.CASE1 else Block.rotatable
    blocks = tuple(ctor(b.id, b.width, b.height) for b in instance.blocks)
    return ProblemInstance(instance.name, blocks, mode, instance.coordinate_sort)


def load_instance(path: str, fmt: str | None, mode: Mode | None,
                  force_aspect=None) -> ProblemInstance:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    fmt = fmt or ("gsrc" if p.suffix == ".blocks" else "native")
    if fmt == "gsrc":
        blocks, diag = parse_gsrc_blocks(text, str(p), force_aspect)
        for line, msg in diag.warnings:
            logging.getLogger(__name__).info("%s:%d: %s", p, line, msg)
        return instance_from_gsrc(p.stem, blocks, mode)
    instance = parse_native(text)
    if force_aspect is not None and instance.mode is Mode.CASE3:
        lo, hi = force_aspect
        instance = ProblemInstance(instance.name, tuple(
            Block(b.id, BlockKind.SOFT, area=b.area, aspect_min=lo, aspect_max=hi)
            for b in instance.blocks), instance.mode, instance.coordinate_sort)
    return with_mode(instance, mode) if mode is not None else instance


def _add_input_args(sp):
    sp.add_argument("input")
    sp.add_argument("--mode", choices=[m.value for m in Mode])
    sp.add_argument("--format", choices=["gsrc", "native"])
    sp.add_argument("--force-aspect", type=_aspect, metavar="MIN:MAX")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="floorplan", description="SMT-based area-minimal floorplanning")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="minimize the region area")
    _add_input_args(sp)
    sp.add_argument("--strategy", choices=[s.value for s in Strategy])
    sp.add_argument("--dialect", choices=[d.value for d in Dialect])
    sp.add_argument("--timeout", type=float, help="seconds per solver query")
    sp.add_argument("--tolerance", type=_fraction, help="area bisection stopping gap")
    sp.add_argument("--cluster-size", type=int)
    sp.add_argument("--unit-scale", type=_fraction, default=Fraction(1),
                    help="length of one coordinate unit in report units")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--out")
    sp.add_argument("--svg")
    sp.add_argument("--csv", help="also write the report row as CSV")
    sp.add_argument("--backend")
    sp.add_argument("--config")
    sp.add_argument("--runs", default="runs", help="transcript directory root")
    sp.add_argument("--no-transcripts", action="store_true")

    vp = sub.add_parser("validate", help="check a placement against an instance")
    vp.add_argument("placement")
    vp.add_argument("instance")
    vp.add_argument("--mode", choices=[m.value for m in Mode])
    vp.add_argument("--format", choices=["gsrc", "native"])

    ep = sub.add_parser("encode", help="write the SMT-LIB2 script without solving")
    _add_input_args(ep)
    group = ep.add_mutually_exclusive_group()
    group.add_argument("--area-bound", type=_fraction)
    group.add_argument("--region-cap", type=_cap, metavar="CxD")
    ep.add_argument("--minimize", action="store_true", help="append (minimize (* c d))")
    ep.add_argument("-o", "--output", required=True)
    return parser


def cmd_solve(args) -> int:
    settings = load_settings(args.config)
    mode = Mode(args.mode) if args.mode else None
    instance = load_instance(args.input, args.format, mode, args.force_aspect)
    config = BackendConfig(
        executable=args.backend or settings.backend,
        dialect=Dialect(args.dialect or settings.dialect),
        timeout=args.timeout or settings.timeout,
        extra_args=tuple(settings.args),
        input_mode=settings.input_mode,
        jobs=args.jobs or settings.jobs,
    )
    strategy_name = args.strategy or settings.strategy
    strategy = Strategy(strategy_name) if strategy_name else None
    if strategy is Strategy.SWEEP and not instance.is_integral:
        raise UsageError("the sweep strategy needs integer coordinates")
    if strategy is Strategy.NATIVE and config.dialect is not Dialect.OPTIMIZING:
        raise UsageError("the native strategy needs --dialect optimizing")

    runs = None if args.no_transcripts else Path(args.runs) / instance.name
    cluster_size = args.cluster_size or settings.cluster_size
    if len(instance.blocks) > cluster_size:
        plan = plan_clusters(instance, cluster_size, args.seed)
        placement, report = solve_clustered(instance, plan, strategy, config, args.tolerance, runs)
    else:
        placement, report = minimize_area(instance, strategy, config, args.tolerance, runs)

    sys.stdout.write(emit_table([report], "text", args.unit_scale))
    if args.csv:
        Path(args.csv).write_text(emit_table([report], "csv", args.unit_scale))
    if placement is None:
        return EXIT_TIMEOUT if report.status is Status.TIMEOUT else EXIT_INFEASIBLE
    problems = validate(placement, instance)
    if problems:
        for v in problems:
            print(v, file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        Path(args.out).write_text(write_placement(placement))
    if args.svg:
        Path(args.svg).write_text(render_svg(placement))
    return EXIT_OK


def cmd_validate(args) -> int:
    placement = read_placement(Path(args.placement).read_text(encoding="utf-8"))
    mode = Mode(args.mode) if args.mode else None
    instance = load_instance(args.instance, args.format, mode)
    if placement.instance_name != instance.name:
        raise errors.InstanceMismatch(f"placement is for {placement.instance_name!r}, "
                                      f"instance is {instance.name!r}")
    problems = validate(placement, instance)
    for v in problems:
        print(v)
    return EXIT_INVALID if problems else EXIT_OK


def cmd_encode(args) -> int:
    mode = Mode(args.mode) if args.mode else None
    instance = load_instance(args.input, args.format, mode, args.force_aspect)
    system = encode(instance, region_cap=args.region_cap, area_bound=args.area_bound)
    text = emit_smtlib(system, objective=MINIMIZE_PRODUCT if args.minimize else None)
    Path(args.output).write_text(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "validate": cmd_validate, "encode": cmd_encode}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, errors.FloorplanError, UsageError, ValueError) as exc:
        if isinstance(exc, errors.EncodingBug):
            print(f"floorplan: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"floorplan: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
