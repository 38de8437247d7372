"""Module for the Stage class."""

from abc import ABC, abstractmethod

from heatrecon.enums.stages import PipelineStage
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.run_context import RunContext


class Stage(ABC):
    """Represents one stage of an experiment run.

    A stage is entered with the context left by the previous one, does its work in `update`, writes
    its artifacts and marks itself done; the manager then moves on to `next_stage`.
    """

    def __init__(self, settings: ExperimentConfig) -> None:
        """Initializes the stage as not done, with no next or previous stage defined."""
        self.settings = settings
        self.done = False
        self.next_stage = PipelineStage.NONE
        self.previous_stage = PipelineStage.NONE
        self.context = RunContext()

    def enter(self, context: RunContext) -> None:
        """Keeps the context of the run."""
        self.done = False
        self.context = context

    def exit(self) -> RunContext:
        """Hands the context on to the next stage."""
        return self.context

    @abstractmethod
    def update(self) -> None:
        """Runs the stage and sets `done`."""

    def release(self) -> None:
        """Releases resources associated with the stage."""
