"""
Command-line interface of the CIUV engine.

Subcommands:

- ``validate``: check a level CSV against the accounting identities
- ``fuse``: run CIUV on a long-format report file
- ``synth``: write a synthetic GDP report set
- ``experiment``: run a scenario (optionally swept) and write its results
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.core.config import ScenarioConfig, SweepSpec, get_settings
from src.core.constants import AlgorithmDefaults, ErrorSignProfiles, ExitCodes
from src.core.exceptions import DatasetError, ValidationError
from src.core.logging import get_logger, setup_logging
from src.factories.service_factory import ServiceFactory
from src.models.reliability import TruthMode
from src.models.views import MappingSpec, Question, RawView, Report, map_view
from src.repositories.dataset_repository import read_mappings, synthesize_gdp_views
from src.services.experiment_service import summarize
from src.utils.error_handlers import handle_cli_error

logger = get_logger(__name__)

EPILOG = """
Examples:
  %(prog)s validate data/sample_levels.csv
  %(prog)s synth --seed 7 --output-dir out/
  %(prog)s fuse out/reports.csv out/truths.csv --e-t 1.0
  %(prog)s experiment --config scenario.env --sweep mv=3,6,9,12
"""


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog="ciuv",
        description="Truth discovery over conflicting numeric views",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--log-level", help="Logging level (default: settings)")
    parser.add_argument(
        "--log-format", choices=["human", "json"], help="Log format (default: settings)"
    )
    parser.add_argument("--env-file", type=Path, help="Optional .env file with CIUV_* settings")

    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser("validate", help="Check a level CSV")
    validate.add_argument("levels", type=Path, help="Level CSV (year + view columns)")
    validate.add_argument(
        "--tolerance",
        type=float,
        default=AlgorithmDefaults.IDENTITY_TOLERANCE,
        help="Relative identity tolerance (default: 0.005)",
    )
    validate.add_argument(
        "--strict", action="store_true", help="Fail when any identity residual is flagged"
    )

    fuse = subparsers.add_parser("fuse", help="Run CIUV on a report file")
    fuse.add_argument("reports", type=Path, help="question_id,source_id,value CSV")
    fuse.add_argument("truths", type=Path, help="question_id,truth CSV (empty truth = unknown)")
    fuse.add_argument(
        "--e-t", type=float, default=AlgorithmDefaults.ERROR_THRESHOLD, help="Error window"
    )
    fuse.add_argument(
        "--mapping", type=Path, help="representation_id,scale,offset CSV keyed by source id"
    )
    fuse.add_argument(
        "--probes",
        type=int,
        default=AlgorithmDefaults.N_PROBE_QUESTIONS,
        help="Probe questions per estimate",
    )
    fuse.add_argument("--seed", type=int, default=0, help="Probe sampling seed")
    fuse.add_argument("--output", type=Path, help="Write estimates here instead of stdout")

    synth = subparsers.add_parser("synth", help="Write a synthetic GDP report set")
    synth.add_argument("--seed", type=int, required=True, help="Generator seed")
    synth.add_argument(
        "--questions", type=int, default=AlgorithmDefaults.N_QUESTIONS, help="Question count"
    )
    synth.add_argument(
        "--sign-profile",
        choices=ErrorSignProfiles.ALL,
        default=ErrorSignProfiles.POSITIVE,
        help="Signs of the per-view mean errors",
    )
    synth.add_argument(
        "--exclude-truth-view", action="store_true", help="Leave GDP_PA out of the sources"
    )
    synth.add_argument("--output-dir", type=Path, help="Directory (default: settings output_dir)")

    experiment = subparsers.add_parser("experiment", help="Run a scenario")
    experiment.add_argument("--config", type=Path, required=True, help="key=value or YAML file")
    experiment.add_argument("--sweep", help="Factor sweep, e.g. mv=3,6,9,12")
    experiment.add_argument("--output-dir", type=Path, help="Directory (default: settings)")
    experiment.add_argument("--workers", type=int, help="Worker processes (default: settings)")

    return parser


def cmd_validate(args: argparse.Namespace, factory: ServiceFactory) -> int:
    """Validate a level table and print its identity report."""
    levels, report = factory.get_dataset_repository(args.tolerance).load_levels(args.levels)
    print(
        f"{len(levels.years)} years, {len(levels.views)} views, "
        f"{len(report.residuals)} identity checks, {len(report.flagged)} flagged"
    )
    for residual in report.flagged:
        print(
            f"  {residual.year} {residual.aggregate_view}: aggregate={residual.aggregate:g} "
            f"components={residual.components_sum:g} residual={residual.residual:g}"
        )
    if args.strict and not report.passed:
        raise DatasetError(
            "Identity check failed", details={"flagged": len(report.flagged)}
        )
    return ExitCodes.OK


def _apply_mappings(reports: List[Report], mappings: Dict[str, MappingSpec]) -> List[Report]:
    mapped = []
    for report in reports:
        spec = mappings.get(report.source_id)
        if spec is None:
            mapped.append(report)
            continue
        value = map_view(RawView(value=report.answer, representation_id=report.source_id), spec)
        mapped.append(
            Report(source_id=report.source_id, question_id=report.question_id, answer=value)
        )
    return mapped


def cmd_fuse(args: argparse.Namespace, factory: ServiceFactory) -> int:
    """
    Estimate every question of a report file.

    Questions with a known truth are the probes; the others are the targets.
    When every question has a truth, each one is estimated from the rest.
    When none has, probes use the cross-source mean as truth.
    """
    repository = factory.get_dataset_repository()
    reports, questions = repository.load_reports(args.reports, args.truths)
    if args.mapping:
        reports = _apply_mappings(reports, read_mappings(args.mapping))

    known = [q for q in questions if q.has_truth]
    unknown = [q for q in questions if not q.has_truth]
    targets = unknown or known
    env = factory.create_static_environment(reports)
    service = factory.get_ciuv_service(
        e_T=args.e_t,
        n_probes=args.probes,
        truth_mode=TruthMode.KNOWN_TRUTH if known else TruthMode.PROXY_MEAN,
    )

    rows = []
    for target in targets:
        if unknown and known:
            pool: Sequence[Question] = known
        else:
            pool = [q for q in questions if q.question_id != target.question_id]
        if not pool:
            raise ValidationError("At least two questions are needed to fuse")
        run = service.run(env, pool, target, seed=args.seed)
        estimate = run.estimate
        rows.append(
            {
                "question_id": target.question_id,
                "u_star": estimate.u_star,
                "mu_star": estimate.mu_star,
                "sigma2_star": estimate.sigma2_star,
                "confidence": estimate.confidence,
                "iterations": len(run.history),
                "stop_reason": run.stop_reason.value,
                "truth": target.ground_truth,
                "error": (
                    abs(estimate.u_star - target.ground_truth) if target.has_truth else None
                ),
            }
        )

    frame = pd.DataFrame(rows)
    if args.output:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.output, index=False, lineterminator="\n")
        logger.info(f"Wrote {len(rows)} estimates to {args.output}")
    else:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
    return ExitCodes.OK


def cmd_synth(args: argparse.Namespace, factory: ServiceFactory) -> int:
    """Write a synthetic report set and its truths."""
    probes, specs = synthesize_gdp_views(
        args.seed,
        args.questions,
        error_signs=ErrorSignProfiles.signs_for(args.sign_profile),
        include_ground_truth_view=not args.exclude_truth_view,
    )
    output_dir = args.output_dir or factory.settings.output_dir
    reports_path, truths_path = factory.get_dataset_repository().save_probe_set(probes, output_dir)
    print(
        f"{len(specs)} sources x {len(probes.questions)} questions "
        f"-> {reports_path}, {truths_path}"
    )
    return ExitCodes.OK


def cmd_experiment(args: argparse.Namespace, factory: ServiceFactory) -> int:
    """Run a scenario, optionally swept, and write results."""
    scenario = ScenarioConfig.from_file(args.config)
    sweep = SweepSpec.parse(args.sweep) if args.sweep else None
    output_dir = args.output_dir or factory.settings.output_dir
    service = factory.get_experiment_service(workers=args.workers)
    result = service.run_and_write(scenario, output_dir, sweep)
    for line in summarize(result.rows):
        print(line)
    return ExitCodes.OK


COMMANDS = {
    "validate": cmd_validate,
    "fuse": cmd_fuse,
    "synth": cmd_synth,
    "experiment": cmd_experiment,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point with command line argument parsing."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings(args.env_file)
        setup_logging(
            level=args.log_level or settings.log_level,
            format_type=args.log_format or settings.log_format,
            log_file=settings.log_file,
        )
        return COMMANDS[args.command](args, ServiceFactory(settings=settings))
    except Exception as e:
        return handle_cli_error(e, args.command)


if __name__ == "__main__":
    sys.exit(main())
