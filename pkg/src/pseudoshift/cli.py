"""Command-line surface with stable file formats.

Commands wire the library together without adding semantics of their own:

  family    derived constants, threshold table, operator descriptions
  witness   search for a witness time / verify an emitted certificate
  build     run the greedy schedule builder / verify its certificate
  orbit     per-time norm and distance statistics as CSV
  density   window-density estimate of an integer set as JSON

Every command is deterministic: JSON keys are sorted and floats print
with 17 significant digits, so identical inputs give byte-identical
outputs.  Exit codes separate three situations: 0 for success, 1 for
usage and schema problems, 2 for negative mathematical outcomes (no
witness found, a failed build, a failed verification).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .construct import (
    ScheduleCertificate,
    ScheduleFailure,
    build_dhc_vector,
    enumerate_targets,
    verify_schedule,
)
from .core import PseudoShift, PseudoShiftError, SupportedVector
from .criterion import (
    NoWitness,
    TargetFamily,
    WitnessCertificate,
    find_witness,
    verify_certificate,
)
from .dynamics import orbit, orbit_to_csv, upper_banach_density
from .family import (
    FamilyParams,
    derived_constants,
    inverse_family,
    make_family,
    threshold_k,
)
from .jsonio import canonical_dumps, format_float, load_path

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures on exit code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# document plumbing
# ---------------------------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(doc: object, out: str | None, pretty: bool) -> None:
    _emit(canonical_dumps(doc, pretty=pretty) + "\n", out)


def _load_operators(path: str) -> tuple[PseudoShift, ...]:
    doc = load_path(path)
    if isinstance(doc, dict) and "operators" in doc:
        doc = doc["operators"]
    if not isinstance(doc, list) or not doc:
        raise PseudoShiftError(
            f"{path}: expected a nonempty operator list "
            "(or an object with an 'operators' key)"
        )
    return tuple(PseudoShift.from_obj(item) for item in doc)


def _load_vector(path: str) -> SupportedVector:
    return SupportedVector.from_obj(load_path(path))


def _load_vector_list(path: str) -> list[SupportedVector]:
    doc = load_path(path)
    if not isinstance(doc, list):
        raise PseudoShiftError(f"{path}: expected a list of vectors")
    return [SupportedVector.from_obj(item) for item in doc]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_family(args) -> int:
    params = FamilyParams.from_obj(load_path(args.params))
    epsilons = args.epsilon or [0.01]
    windows = args.window_M or [0]
    shifts = make_family(params)

    lines = [f"family: N={params.N} members, p={format_float(params.p)}"]
    variants = [("", False)] + ([("inverse ", True)] if args.inverse else [])
    for label, inverse in variants:
        constants = derived_constants(params, inverse=inverse)
        lines.append(
            f"{label}constants:"
            f" gamma={format_float(constants['gamma'])}"
            f" alpha={format_float(constants['alpha'])}"
            f" beta={format_float(constants['beta'])}"
            f" L={constants['L']}"
            f" min_step={constants['min_step']}"
        )
    threshold_rows = []
    for epsilon in epsilons:
        for M in windows:
            row = {
                "epsilon": epsilon,
                "M": M,
                "threshold": threshold_k(params, epsilon, M),
            }
            lines.append(
                f"threshold epsilon={format_float(epsilon)} M={M}"
                f" -> {row['threshold']}"
            )
            if args.inverse:
                row["inverse_threshold"] = threshold_k(params, epsilon, M, inverse=True)
                lines.append(
                    f"inverse threshold epsilon={format_float(epsilon)} M={M}"
                    f" -> {row['inverse_threshold']}"
                )
            threshold_rows.append(row)
    sys.stdout.write("\n".join(lines) + "\n")

    if args.out is not None:
        doc = {
            "params": params.to_obj(),
            "constants": derived_constants(params),
            "thresholds": threshold_rows,
            "operators": [shift.to_obj() for shift in shifts],
        }
        if args.inverse:
            doc["inverse_constants"] = derived_constants(params, inverse=True)
            doc["inverse_operators"] = [
                shift.to_obj() for shift in inverse_family(params)
            ]
        _emit_json(doc, args.out, args.pretty)
    return EXIT_OK


def _cmd_witness_search(args) -> int:
    shifts = _load_operators(args.operators)
    targets = TargetFamily.from_obj(load_path(args.targets))
    result = find_witness(
        shifts,
        targets,
        p=args.p,
        epsilon=args.epsilon,
        K=args.K,
        n_max=args.n_max,
    )
    if isinstance(result, NoWitness):
        _emit_json(result.to_obj(), args.out, args.pretty)
        return EXIT_NEGATIVE
    _emit_json(result.to_obj(), args.out, args.pretty)
    return EXIT_OK


def _cmd_witness_verify(args) -> int:
    shifts = _load_operators(args.operators)
    targets = TargetFamily.from_obj(load_path(args.targets))
    cert = WitnessCertificate.from_obj(load_path(args.certificate))
    report = verify_certificate(shifts, targets, cert, p=args.p)
    _emit_json(report.to_obj(), args.out, args.pretty)
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _cmd_build_run(args) -> int:
    shifts = _load_operators(args.operators)
    if args.targets is not None:
        targets = _load_vector_list(args.targets)
    else:
        M_max, grid, count = args.enumerate
        if not (M_max.is_integer() and count.is_integer()):
            raise ValueError("--enumerate M_MAX and COUNT must be integers")
        targets = enumerate_targets(int(M_max), grid, int(count))
    result = build_dhc_vector(
        shifts,
        targets,
        epsilon0=args.epsilon0,
        p=args.p,
        n_max_per_step=args.n_max_per_step,
    )
    if isinstance(result, ScheduleFailure):
        _emit_json(result.to_obj(), args.out, args.pretty)
        return EXIT_NEGATIVE
    _emit_json(result.to_obj(), args.out, args.pretty)
    return EXIT_OK


def _cmd_build_verify(args) -> int:
    shifts = _load_operators(args.operators)
    cert = ScheduleCertificate.from_obj(load_path(args.certificate))
    report = verify_schedule(shifts, cert)
    _emit_json(report.to_obj(), args.out, args.pretty)
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _cmd_orbit(args) -> int:
    if args.plot and args.out is None:
        raise ValueError("--plot needs --out to place the image next to the CSV")
    shifts = _load_operators(args.operators)
    x = _load_vector(args.vector)
    target = None if args.target is None else _load_vector(args.target)
    records = orbit(shifts, x, args.n_max, mode="stats", target=target, p=args.p)
    names = [shift.name for shift in shifts]
    _emit(orbit_to_csv(records, names), args.out)
    if args.plot:
        from .plotting import render_orbit_plot

        image = _sibling_image_path(args.out)
        render_orbit_plot(records, names, image)
        sys.stderr.write(f"plot written to {image}\n")
    return EXIT_OK


def _sibling_image_path(out: str) -> str:
    stem, dot, suffix = out.rpartition(".")
    if dot and "/" not in suffix and "\\" not in suffix:
        return f"{stem}.png"
    return f"{out}.png"


def _cmd_density(args) -> int:
    doc = load_path(args.set)
    if not isinstance(doc, list):
        raise PseudoShiftError(f"{args.set}: expected a list of integers")
    estimate = upper_banach_density(doc, args.window, args.m_max)
    _emit_json(estimate.to_obj(), args.out, args.pretty)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(parser: _Parser, with_p: bool = True) -> None:
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument(
        "--pretty", action="store_true", help="indent JSON output"
    )
    if with_p:
        parser.add_argument(
            "--p", type=float, default=2.0, help="norm exponent (default 2)"
        )


def build_parser() -> _Parser:
    parser = _Parser(
        prog="pseudoshift",
        description="Weighted pseudo-shift dynamics: thresholds, witnesses, "
        "schedules, orbits, densities.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    family = commands.add_parser(
        "family", help="derived constants, thresholds, operator descriptions"
    )
    family.add_argument("params", help="family parameter document (JSON)")
    family.add_argument(
        "--epsilon", type=float, action="append",
        help="threshold tolerance, repeatable (default 0.01)",
    )
    family.add_argument(
        "--window-M", type=int, action="append", dest="window_M",
        help="window radius for the threshold table, repeatable (default 0)",
    )
    family.add_argument(
        "--inverse", action="store_true",
        help="also derive the family of inverse operators",
    )
    _add_common(family, with_p=False)
    family.set_defaults(handler=_cmd_family)

    witness = commands.add_parser("witness", help="witness search and verification")
    witness_sub = witness.add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    search = witness_sub.add_parser("search", help="scan times for a witness")
    search.add_argument("--operators", required=True, help="operator list (JSON)")
    search.add_argument("--targets", required=True, help="target family (JSON)")
    search.add_argument("--epsilon", type=float, required=True, help="tolerance")
    search.add_argument("--K", type=int, default=1, help="first time to try")
    search.add_argument("--n-max", type=int, default=1000, dest="n_max",
                        help="last time to try")
    _add_common(search)
    search.set_defaults(handler=_cmd_witness_search)

    wverify = witness_sub.add_parser("verify", help="recheck a witness certificate")
    wverify.add_argument("--operators", required=True, help="operator list (JSON)")
    wverify.add_argument("--targets", required=True, help="target family (JSON)")
    wverify.add_argument("--certificate", required=True, help="certificate (JSON)")
    _add_common(wverify)
    wverify.set_defaults(handler=_cmd_witness_verify)

    build = commands.add_parser("build", help="greedy schedule construction")
    build_sub = build.add_subparsers(
        dest="subcommand", required=True, parser_class=_Parser
    )
    run = build_sub.add_parser("run", help="build a visitation schedule")
    run.add_argument("--operators", required=True, help="operator list (JSON)")
    targets_from = run.add_mutually_exclusive_group(required=True)
    targets_from.add_argument("--targets", help="list of target vectors (JSON)")
    targets_from.add_argument(
        "--enumerate", nargs=3, type=float, metavar=("M_MAX", "GRID", "COUNT"),
        help="enumerate targets instead of reading them",
    )
    run.add_argument("--epsilon0", type=float, required=True,
                     help="tolerance of the first step")
    run.add_argument("--n-max-per-step", type=int, default=2000,
                     dest="n_max_per_step", help="scan window per step")
    _add_common(run)
    run.set_defaults(handler=_cmd_build_run)

    bverify = build_sub.add_parser("verify", help="recheck a schedule certificate")
    bverify.add_argument("--operators", required=True, help="operator list (JSON)")
    bverify.add_argument("--certificate", required=True, help="certificate (JSON)")
    _add_common(bverify, with_p=False)
    bverify.set_defaults(handler=_cmd_build_verify)

    orbit_cmd = commands.add_parser("orbit", help="per-time statistics as CSV")
    orbit_cmd.add_argument("--operators", required=True, help="operator list (JSON)")
    orbit_cmd.add_argument("--vector", required=True, help="starting vector (JSON)")
    orbit_cmd.add_argument("--n-max", type=int, required=True, dest="n_max",
                           help="last time to record")
    orbit_cmd.add_argument("--target", help="fixed target vector (JSON)")
    orbit_cmd.add_argument(
        "--plot", action="store_true",
        help="also render a PNG next to the CSV (needs --out)",
    )
    _add_common(orbit_cmd)
    orbit_cmd.set_defaults(handler=_cmd_orbit)

    density = commands.add_parser("density", help="window-density estimate")
    density.add_argument("--set", required=True, help="list of integers (JSON)")
    density.add_argument("--window", type=int, required=True, help="window length")
    density.add_argument("--m-max", type=int, required=True, dest="m_max",
                         help="last window position")
    _add_common(density, with_p=False)
    density.set_defaults(handler=_cmd_density)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (PseudoShiftError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
