"""Command-line interface: one binary, five subcommands, JSON in and out.

Exit codes are a stable contract:

    0  success
    2  input error (bad JSON, bad shapes, missing tables, malformed certificate)
    3  mathematical precondition failure (singular matrix, non-semisimple target, ...)
    4  budget or schedule exhaustion
    5  certificate verification failure

Outputs are canonical JSON (sorted keys, compact separators, one trailing
newline) and are byte-identical across repeated runs with the same inputs.
Nothing in the core algorithms is randomized.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import cryst, jordan, modgrp, separate
from .errors import (
    InputError,
    MalformedCertificateError,
    PreconditionError,
    ResourceError,
)
from .exactlin import IntegerMatrix, RationalMatrix

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4
EXIT_VERIFY_FAILED = 5

_DEFAULT_SCAN_WORDLEN = 3


@dataclass
class RunConfig:
    schedule: list[int] | None
    element_cap: int
    word_length: int
    output: str | None
    full: bool
    verbose: bool


def _load_json_arg(arg: str):
    """Accept either a file path or inline JSON (starts with '{' or '[')."""
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        try:
            with open(arg, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _emit(data: dict, config: RunConfig) -> None:
    text = json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _note(config: RunConfig, message: str) -> None:
    if config.verbose:
        print(message, file=sys.stderr)


def _config_from_args(args) -> RunConfig:
    schedule = None
    if getattr(args, "modulus_schedule", None):
        try:
            schedule = [int(x) for x in args.modulus_schedule.split(",") if x.strip()]
        except ValueError as exc:
            raise InputError(f"bad --modulus-schedule: {exc}") from exc
        if not schedule:
            raise InputError("--modulus-schedule is empty")
        if any(m < 2 for m in schedule):
            raise InputError("schedule moduli must be >= 2")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise InputError("--modulus-schedule must be strictly increasing")
    cap = getattr(args, "element_cap", modgrp.DEFAULT_CAP)
    if cap <= 0:
        raise InputError("--element-cap must be positive")
    wordlen = getattr(args, "word_length", _DEFAULT_SCAN_WORDLEN)
    if wordlen <= 0:
        raise InputError("--word-length must be positive")
    return RunConfig(
        schedule=schedule,
        element_cap=cap,
        word_length=wordlen,
        output=getattr(args, "output", None),
        full=getattr(args, "full", False),
        verbose=getattr(args, "verbose", False),
    )


def _parse_gens(data) -> list[IntegerMatrix]:
    if not isinstance(data, list):
        raise InputError("generators must be a JSON array of matrices")
    return [IntegerMatrix.from_json_dict(g) for g in data]


def _vu_scan_note(config: RunConfig, gens: list[IntegerMatrix]) -> None:
    """Advisory bounded scan; results go to stderr, never into certificates."""
    wordlen = config.word_length
    consistent = jordan.is_virtually_unipotent_witness(gens, wordlen)
    if consistent:
        print(
            f"note: generators consistent with virtual unipotency up to word"
            f" length {wordlen} (bounded scan, not a proof)",
            file=sys.stderr,
        )
    else:
        print(
            f"warning: generators are NOT virtually unipotent (refuted at word"
            f" length <= {wordlen}); the separation search may exhaust its schedule",
            file=sys.stderr,
        )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_jordan(args) -> int:
    config = _config_from_args(args)
    mat = RationalMatrix.from_json_dict(_load_json_arg(args.matrix))
    pair = jordan.jordan_decompose(mat)
    result = {
        "semisimple": pair.semisimple.to_json_dict(),
        "unipotent": pair.unipotent.to_json_dict(),
        "is_semisimple": jordan.is_semisimple(mat),
        "is_unipotent": jordan.is_unipotent(mat),
    }
    if mat.is_integral and mat.to_integer().det() in (1, -1):
        result["torsion_order"] = jordan.torsion_order(mat.to_integer())
    else:
        result["torsion_order"] = None
    _emit(result, config)
    return EXIT_OK


def _cmd_avoid(args) -> int:
    config = _config_from_args(args)
    if args.verify_only:
        return _verify_file(args.verify_only, config)
    if args.gens is None or args.eta is None:
        raise InputError("avoid needs GENS and ETA (or --verify-only FILE)")
    gens = _parse_gens(_load_json_arg(args.gens))
    eta = IntegerMatrix.from_json_dict(_load_json_arg(args.eta))
    _vu_scan_note(config, gens)
    cert = separate.avoid_conjugacy(
        gens, eta, config.schedule, cap=config.element_cap
    )
    data = cert.to_json_dict()
    if config.full:
        data["image_elements"], data["class_elements"] = _full_elements(cert, config)
    _emit(data, config)
    return EXIT_OK


def _full_elements(cert, config: RunConfig):
    image = modgrp.generate(
        [modgrp.reduce(g, cert.m) for g in cert.gamma_gens],
        config.element_cap,
        n=cert.n,
        m=cert.m,
    )
    cls = modgrp.conj_class(modgrp.reduce(cert.eta, cert.m), config.element_cap)
    return (
        sorted(e.to_lists() for e in image.elements),
        sorted(e.to_lists() for e in cls.orbit),
    )


def _cmd_torsion_free(args) -> int:
    config = _config_from_args(args)
    if args.verify_only:
        return _verify_file(args.verify_only, config)
    if args.gens is None:
        raise InputError("torsion-free needs GENS (or --verify-only FILE)")
    gens = _parse_gens(_load_json_arg(args.gens))
    if not gens:
        raise InputError("torsion-free needs at least one generator")
    n = gens[0].n
    if args.reps:
        reps_data = _load_json_arg(args.reps)
        reps = _parse_gens(reps_data)
        for rep in reps:
            if jordan.torsion_order(rep) is None:
                raise InputError("custom representative table contains a"
                                 " matrix of infinite order")
        table: separate.TorsionTable | list[IntegerMatrix] = reps
    else:
        try:
            table = separate.torsion_class_table(n)
        except InputError:
            raise InputError(
                f"no builtin torsion table for dimension {n}; supply --reps FILE"
            ) from None
    _vu_scan_note(config, gens)
    cert = separate.torsion_free_overgroup(
        gens, table, config.schedule, cap=config.element_cap
    )
    _emit(cert.to_json_dict(), config)
    return EXIT_OK


def _cmd_semifactors(args) -> int:
    config = _config_from_args(args)
    group = cryst.CrystGroup.from_json_dict(
        _load_json_arg(args.group),
        lattice_wordlen=max(config.word_length, cryst.DEFAULT_LATTICE_WORDLEN),
    )
    factors = cryst.semifactor_representatives(group)
    _emit(factors.to_json_dict(), config)
    return EXIT_OK


def _cmd_witness_prime(args) -> int:
    config = _config_from_args(args)
    factor = RationalMatrix.from_json_dict(_load_json_arg(args.factor))
    gens = _parse_gens(_load_json_arg(args.gens))
    witness = separate.witness_prime(factor, gens, cap=config.element_cap)
    _emit(witness.to_json_dict(), config)
    return EXIT_OK


def _verify_file(path: str, config: RunConfig) -> int:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    ok = separate.verify_certificate(text, cap=config.element_cap)
    if ok:
        _note(config, f"certificate {path} verified")
        return EXIT_OK
    print(f"verification failed: {path}", file=sys.stderr)
    return EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, schedule: bool = False) -> None:
    parser.add_argument("--element-cap", type=int, default=modgrp.DEFAULT_CAP,
                        help="budget for group/orbit enumeration")
    parser.add_argument("--word-length", type=int, default=_DEFAULT_SCAN_WORDLEN,
                        help="bounded-scan word length (also raises the lattice"
                             " word scan of semifactors above its default of 6)")
    parser.add_argument("--output", help="write result JSON to FILE instead of stdout")
    parser.add_argument("--full", action="store_true",
                        help="include full element lists, not just sizes and digests")
    parser.add_argument("-v", "--verbose", action="store_true")
    if schedule:
        parser.add_argument("--modulus-schedule",
                            help="comma-separated strictly increasing moduli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congrusep",
        description="Congruence-subgroup separation certificates for integer"
                    " matrix groups.  The CONGRUSEP_BIT_BOUND environment"
                    " variable overrides the Smith-reduction blow-up guard.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jordan", help="Jordan decomposition and predicates")
    p.add_argument("matrix", help="matrix JSON (inline or file path)")
    _add_common(p)
    p.set_defaults(func=_cmd_jordan)

    p = sub.add_parser("avoid", help="separate a group from a semisimple conjugacy class")
    p.add_argument("gens", nargs="?", help="generator list JSON")
    p.add_argument("eta", nargs="?", help="semisimple target matrix JSON")
    p.add_argument("--verify-only", metavar="FILE",
                   help="re-verify an existing certificate file and exit")
    _add_common(p, schedule=True)
    p.set_defaults(func=_cmd_avoid)

    p = sub.add_parser("torsion-free",
                       help="find a torsion-free congruence overgroup certificate")
    p.add_argument("gens", nargs="?", help="generator list JSON")
    p.add_argument("--reps", metavar="FILE",
                   help="custom torsion representative table (matrix list JSON)")
    p.add_argument("--verify-only", metavar="FILE",
                   help="re-verify an existing certificate file and exit")
    _add_common(p, schedule=True)
    p.set_defaults(func=_cmd_torsion_free)

    p = sub.add_parser("semifactors",
                       help="enumerate semisimple factors of a crystallographic group")
    p.add_argument("group", help="crystallographic group JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_semifactors)

    p = sub.add_parser("witness-prime",
                       help="find a prime at which a semisimple factor escapes the group")
    p.add_argument("factor", help="semisimple factor matrix JSON")
    p.add_argument("gens", help="generator list JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_witness_prime)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MalformedCertificateError as exc:
        print(f"error: malformed certificate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
