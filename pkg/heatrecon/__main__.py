"""Module that contains the main entry point for the application."""

import argparse
import sys
from pathlib import Path

from loguru import logger

from heatrecon.app import App, configure_logging, load_settings
from heatrecon.constants import EXIT_OK, EXIT_UNEXPECTED, PACKAGE_NAME
from heatrecon.enums.formulations import Formulation, SolverMethod
from heatrecon.enums.stages import PipelineStage
from heatrecon.errors import ReconError
from heatrecon.sweep import run_sweep

COMMANDS = {
    "forward": (PipelineStage.FORWARD, "compute the ground truth"),
    "observe": (PipelineStage.OBSERVE, "compute the truth and sample it on q_T"),
    "reconstruct": (PipelineStage.RECONSTRUCT, "reconstruct the state from the observation"),
    "diagnose": (PipelineStage.DIAGNOSE, "reconstruct and evaluate every diagnostic"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file overlaid on the packaged configuration")
    common.add_argument("--out", type=Path, help="artifact directory")
    common.add_argument("--seed", type=int, help="seed of the observation noise")
    common.add_argument("--formulation", choices=[f.value for f in Formulation])
    common.add_argument("--solver", choices=[m.value for m in SolverMethod])
    common.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")

    parser = argparse.ArgumentParser(prog=PACKAGE_NAME, description="Reconstruction of parabolic states from q_T.")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, (_, description) in COMMANDS.items():
        command = commands.add_parser(name, parents=[common], help=description)
        if name in ("reconstruct", "diagnose"):
            command.add_argument("--observation", type=Path, help="read the observation from this CSV file")
    sweep = commands.add_parser("sweep", parents=[common], help="run the experiment on nested refinements")
    sweep.add_argument("--levels", type=int, help="number of levels, at least 2")
    return parser


def overrides(options: argparse.Namespace) -> dict:
    """Configuration values given on the command line."""

    return {
        ("output", "directory"): None if options.out is None else str(options.out),
        ("observation", "seed"): options.seed,
        ("formulation", "name"): options.formulation,
        ("solver", "method"): options.solver,
    }


def main(args: list[str] | None = None) -> int:
    """Main entry point for the application.

    Args:
        args: arguments from the CLI. Defaults to None.

    Returns:
        0 on success, otherwise the exit code of the error category.
    """
    if args is None:
        args = sys.argv[1:]

    options = build_parser().parse_args(args)
    configure_logging("INFO", options.verbose)
    try:
        settings = load_settings(options.config, overrides(options))
        configure_logging(settings.log_level, options.verbose)
        if options.command == "sweep":
            run_sweep(settings, options.levels)
        else:
            final, _ = COMMANDS[options.command]
            App(settings, final, getattr(options, "observation", None)).run()
    except ReconError as e:
        print(f"error: {e.category}: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception("Unexpected failure")
        print(f"error: unexpected: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
