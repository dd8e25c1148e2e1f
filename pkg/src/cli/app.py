"""
Command-line entry point.

Exit codes: 0 success, 1 the instance fails a mathematical check (the report is still written), 2 bad input or I/O.
Reports go to ``--out`` or stdout; logs go to stderr.
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from cli.formats import (
    OperatorKind,
    OperatorRecord,
    ReportRecord,
    ReportStatus,
    read_operator,
    write_atomic,
    write_operator,
)
from cli.run_config import Command, RunConfig
from config import get_config
from config.models.consolidated import AppConfig
from config.models.logging import LogLevel
from config.models.tolerances import Tolerances
from symmetry.errors import MathematicalFailure, VerificationError, WignerError
from symmetry.generators import GeneratorKind, GeneratorSpec, instantiate, symmetry_from_witness
from symmetry.hilbert import canonicalize, gap_distance, random_domain_element
from symmetry.reconstruct import (
    Linearity,
    SymmetryMap,
    reconstruct,
    validation_residuals,
    verification_samples,
    verify_witness,
)
from symmetry.resolving import build_resolving_set, profile_of, recover_from_profile
from utils.logging_helpers import ProgressStage, configure_logging, get_logger, log_progress

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wigner-reconstruct",
        description="Reconstruct and check the isometry behind a transition-probability preserving map",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python src/main.py generate --kind haar_unitary --n 4 --seed 7 --out w.json
  python src/main.py reconstruct --in w.json --out report.json
  python src/main.py validate --kind partial_conjugation --n 5 --j 3
  python src/main.py resolve --n 3 --seed 1
        """,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=[k.value for k in GeneratorKind], help="Generator of the instance")
    common.add_argument("--n", type=int, help="Domain dimension N")
    common.add_argument("--m", type=int, help="Codomain dimension M (default N, N+1 for shift)")
    common.add_argument("--j", type=int, help="First conjugated pair for partial_conjugation (1-based)")
    common.add_argument("--tag", choices=[t.value for t in Linearity], help="Linearity of a random_isometry witness")
    common.add_argument("--seed", type=int, help="Seed of every random stream (default from settings)")
    common.add_argument("--samples", type=int, help="Random samples on top of the fixed fixtures")
    common.add_argument("--workers", type=int, help="Threads evaluating samples")
    common.add_argument("--tol-verify", type=float, dest="tol_verify", help="Max gap residual accepted")
    common.add_argument("--in", type=Path, dest="input_path", help="Operator file (witness, generator or vector)")
    common.add_argument("--out", type=Path, dest="output_path", help="Output file (default: stdout)")
    common.add_argument("--witness", type=Path, dest="witness_path", help="Candidate witness file for verify")
    common.add_argument("--config", type=Path, dest="config_path", help="YAML settings file")
    common.add_argument("--log-level", choices=[lvl.value for lvl in LogLevel], dest="log_level")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="Write a ground-truth operator file")
    sub.add_parser("reconstruct", parents=[common], help="Reconstruct and verify the witness of an instance")
    sub.add_parser("verify", parents=[common], help="Check a candidate witness against an instance")
    sub.add_parser("validate", parents=[common], help="Measure how far an instance is from preserving overlaps")
    sub.add_parser("resolve", parents=[common], help="Round-trip a projection through its resolving-set profile")
    return parser


def run_config_from_args(args: argparse.Namespace, settings: AppConfig) -> RunConfig:
    """
    Merge flags over the loaded settings.

    Raises
    ------
    pydantic.ValidationError
        If the merged values are invalid.
    """
    seed = settings.RUN.SEED if args.seed is None else args.seed
    generator = None
    if args.kind is not None:
        fields = {"kind": args.kind, "n": args.n, "m": args.m, "seed": seed, "j": args.j, "tag": args.tag}
        generator = GeneratorSpec(
            scramble=settings.RUN.SCRAMBLE, **{key: value for key, value in fields.items() if value is not None}
        )
    tolerances = settings.TOLERANCES
    if args.tol_verify is not None:
        tolerances = Tolerances(**{**tolerances.model_dump(), "VERIFY": args.tol_verify})
    return RunConfig(
        command=args.command,
        generator=generator,
        input_path=args.input_path,
        output_path=args.output_path,
        witness_path=args.witness_path,
        dim=args.n if args.kind is None else None,
        samples=settings.RUN.SAMPLES if args.samples is None else args.samples,
        seed=seed,
        workers=settings.RUN.WORKERS if args.workers is None else args.workers,
        tolerances=tolerances,
    )


def load_instance(config: RunConfig) -> SymmetryMap:
    """Build the black box from ``--in`` (witness or generator record) or from the generator flags."""
    if config.input_path is None:
        assert config.generator is not None
        return instantiate(config.generator, config.tolerances).symmetry
    record = read_operator(config.input_path)
    match record.kind:
        case OperatorKind.WITNESS:
            seed = config.seed if record.meta.seed is None else record.meta.seed
            scramble = True if record.meta.scramble is None else record.meta.scramble
            return symmetry_from_witness(record.witness(), seed, scramble, config.tolerances)
        case OperatorKind.GENERATOR:
            return instantiate(record.generator_spec(), config.tolerances).symmetry
        case _:
            raise ValueError(f"{config.command} needs a witness or generator record, got {record.kind}")


def _new_report(config: RunConfig, status: ReportStatus, **fields: Any) -> ReportRecord:
    return ReportRecord(
        command=str(config.command),
        status=status,
        timestamp=datetime.now(UTC),
        tolerances=config.tolerances,
        seed=config.seed,
        samples=config.samples,
        **fields,
    )


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path is None:
        sys.stdout.write(text)
    else:
        write_atomic(config.output_path, text)


def cmd_generate(config: RunConfig) -> int:
    assert config.generator is not None
    instance = instantiate(config.generator, config.tolerances)
    record = OperatorRecord.from_instance(instance)
    if config.output_path is None:
        sys.stdout.write(record.model_dump_json(indent=2, by_alias=True) + "\n")
    else:
        write_operator(config.output_path, record)
    logger.info("Generated %s instance C^%d -> C^%d", config.generator.kind, record.n, record.m)
    return EXIT_OK


def cmd_reconstruct(config: RunConfig) -> int:
    f = load_instance(config)
    try:
        report = reconstruct(f, config.samples, config.seed, config.workers, config.tolerances)
    except VerificationError as e:
        fields = ReportRecord.fields_of(e.report) if e.report is not None else {}
        _emit(config, _new_report(config, ReportStatus.FAILED, reason=e.reason, message=str(e), **fields).to_json())
        return EXIT_FAILURE
    except MathematicalFailure as e:
        record = _new_report(
            config,
            ReportStatus.FAILED,
            reason=e.reason,
            message=str(e),
            domain_dim=f.domain_dim,
            codomain_dim=f.codomain_dim,
        )
        _emit(config, record.to_json())
        return EXIT_FAILURE
    _emit(config, _new_report(config, ReportStatus.OK, **ReportRecord.fields_of(report)).to_json())
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    f = load_instance(config)
    assert config.witness_path is not None
    candidate = read_operator(config.witness_path).witness()
    samples = verification_samples(f.domain_dim, config.samples, config.seed)
    worst, mean = verify_witness(f, candidate, samples, config.workers, config.tolerances)
    passed = worst <= config.tolerances.VERIFY
    record = _new_report(
        config,
        ReportStatus.OK if passed else ReportStatus.FAILED,
        reason=None if passed else VerificationError.reason,
        domain_dim=f.domain_dim,
        codomain_dim=f.codomain_dim,
        tag=candidate.tag,
        witness=OperatorRecord.from_witness(candidate),
        max_gap_residual=worst,
        mean_gap_residual=mean,
        sample_count=len(samples),
    )
    _emit(config, record.to_json())
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_validate(config: RunConfig) -> int:
    f = load_instance(config)
    log_progress(logger, "validate", samples=config.samples)
    tp_residual, gap_defect = validation_residuals(f, config.samples, config.seed, config.workers, config.tolerances)
    passed = tp_residual <= config.tolerances.VERIFY
    log_progress(
        logger, "validate", ProgressStage.COMPLETED if passed else ProgressStage.FAILED, tp_residual=tp_residual
    )
    record = _new_report(
        config,
        ReportStatus.OK if passed else ReportStatus.FAILED,
        reason=None if passed else "not_a_symmetry",
        domain_dim=f.domain_dim,
        codomain_dim=f.codomain_dim,
        transition_probability_residual=tp_residual,
        gap_isometry_defect=gap_defect,
    )
    _emit(config, record.to_json())
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_resolve(config: RunConfig) -> int:
    tol = config.tolerances
    if config.input_path is not None:
        record = read_operator(config.input_path)
        if record.kind is not OperatorKind.VECTOR:
            raise ValueError(f"resolve needs a vector record, got {record.kind}")
        p = canonicalize(record.vector(), tol)
    else:
        assert config.dim is not None
        p = random_domain_element(config.dim, np.random.default_rng(config.seed), tol)

    log_progress(logger, "resolve", dim=p.dim)
    profile = profile_of(p, build_resolving_set(p.dim))
    fields: dict[str, Any] = {"domain_dim": p.dim, "profile": profile.as_array().tolist()}
    try:
        recovered = recover_from_profile(profile, tol)
    except MathematicalFailure as e:
        record_out = _new_report(config, ReportStatus.FAILED, reason=e.reason, message=str(e), **fields)
        _emit(config, record_out.to_json())
        return EXIT_FAILURE

    residual = gap_distance(p, recovered, tol)
    passed = residual <= tol.EQ
    record_out = _new_report(
        config,
        ReportStatus.OK if passed else ReportStatus.FAILED,
        reason=None if passed else "round_trip",
        recovered=[(float(z.real), float(z.imag)) for z in recovered.rep],
        round_trip_residual=residual,
        **fields,
    )
    _emit(config, record_out.to_json())
    return EXIT_OK if passed else EXIT_FAILURE


COMMANDS: dict[Command, Callable[[RunConfig], int]] = {
    Command.GENERATE: cmd_generate,
    Command.RECONSTRUCT: cmd_reconstruct,
    Command.VERIFY: cmd_verify,
    Command.VALIDATE: cmd_validate,
    Command.RESOLVE: cmd_resolve,
}


def _describe_validation_error(e: ValidationError) -> str:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<document>"
    return f"Invalid input at {location}: {first['msg']}"


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        settings = get_config(args.config_path)
        logging_config = settings.LOGGING
        if args.log_level is not None:
            logging_config = logging_config.model_copy(update={"LOG_LEVEL": LogLevel(args.log_level)})
        configure_logging(logging_config)
        config = run_config_from_args(args, settings)
        return COMMANDS[config.command](config)
    except MathematicalFailure as e:
        logger.error("%s: %s", e.reason, e)
        return EXIT_FAILURE
    except ValidationError as e:
        message = _describe_validation_error(e)
    except (WignerError, ValueError, OSError) as e:
        message = f"{type(e).__name__}: {e}"
    logger.error(message)
    return EXIT_INPUT
