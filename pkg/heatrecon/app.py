"""This module loads the configuration of an experiment and runs its stages.

A run writes a manifest (the resolved configuration, the package versions and the seed), then runs the
stages up to the requested one, then writes the run report.
"""

from __future__ import annotations

import os
import platform
import sys
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np
import scipy
from loguru import logger

from heatrecon import __version__
from heatrecon.config import Config, merge, set_cfg
from heatrecon.constants import CONFIG_ENV_VAR, MANIFEST_FILE, REPORT_FILE
from heatrecon.enums.stages import PipelineStage
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.run_context import RunContext
from heatrecon.stages.stage_manager import StageManager
from heatrecon.storage.utils import write_json, write_report

Overrides = Mapping[tuple[str, ...], Any]


def configure_logging(level: str, verbose: bool = False) -> None:
    """Sends the log to stderr at `level`, or DEBUG when verbose."""

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else level)


def load_settings(config_path: Path | str | None = None, overrides: Overrides | None = None) -> ExperimentConfig:
    """Loads the configuration and validates it.

    Args:
        config_path: a JSON file overlaid on the packaged defaults; by default the file named by the
            HEATRECON_CONFIG environment variable, if set.
        overrides: values set after loading, by key path, e.g. {("observation", "seed"): 7}.

    Raises:
        IoError: if the file cannot be read.
        ConfigError: if a value violates a precondition.
    """
    config = Config.get_instance()
    if config_path is None:
        config_path = os.environ.get(CONFIG_ENV_VAR)
    if config_path is None:
        config.reset()
    else:
        config.load(config_path)
    for keys, value in (overrides or {}).items():
        if value is not None:
            logger.info(f"Overriding {'.'.join(keys)} with {value}")
            set_cfg(*keys, value=value)
    return ExperimentConfig.load()


def manifest(settings: ExperimentConfig, command: str) -> dict:
    """The resolved configuration with a `manifest` section; loading it as a configuration reproduces the run."""

    return merge(
        settings.resolved,
        {
            "manifest": {
                "command": command,
                "seed": settings.observation.seed,
                "versions": {
                    "heatrecon": __version__,
                    "numpy": np.__version__,
                    "scipy": scipy.__version__,
                    "python": platform.python_version(),
                },
            }
        },
    )


class App:
    """Runs the stages of an experiment and persists its manifest and report.

    Attributes:
        __settings: The validated configuration.
        __final: The last stage to run.
        __stage_manager: The stage manager object.
    """

    def __init__(
        self,
        settings: ExperimentConfig,
        final: PipelineStage = PipelineStage.DIAGNOSE,
        observation_file: Path | None = None,
    ) -> None:
        logger.info("Initializing run...")
        self.__settings = settings
        self.__final = final
        self.__stage_manager = StageManager(settings, final, RunContext(observation_file=observation_file))

    @property
    def directory(self) -> Path:
        """The artifact directory."""
        return self.__settings.output.directory

    def run(self) -> RunContext:
        """Runs every stage up to the final one.

        Returns:
            The context of the run, with the data and report entries of every stage.

        Raises:
            ReconError: from the stage that failed; the artifacts of earlier stages are kept.
        """
        logger.info(f"Starting run up to {self.__final.name.lower()} in {self.directory}")
        write_json(self.directory / MANIFEST_FILE, manifest(self.__settings, self.__final.name.lower()))
        try:
            while not self.__stage_manager.finished:
                self.__stage_manager.update()
        finally:
            context = self.__stage_manager.release()

        write_report(self.directory / REPORT_FILE, context.report)
        logger.info("Run finished.")
        return context


def run_experiment(
    config_path: Path | str | None = None,
    overrides: Overrides | None = None,
    final: PipelineStage = PipelineStage.DIAGNOSE,
    observation_file: Path | None = None,
) -> Path:
    """Loads a configuration, runs it and returns the artifact directory."""

    settings = load_settings(config_path, overrides)
    app = App(settings, final, observation_file)
    app.run()
    return app.directory
