"""Module for running the stages of an experiment."""

from loguru import logger

from heatrecon.enums.stages import PipelineStage
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.diagnose import Diagnose
from heatrecon.stages.forward import Forward
from heatrecon.stages.observe import Observe
from heatrecon.stages.reconstruct import Reconstruct
from heatrecon.stages.run_context import RunContext


class StageManager:
    """Runs the stages of an experiment in order, up to a final stage.

    Attributes:
        __stages: A dictionary mapping stage names to their stage objects.
        __final: The last stage to run.
        __current_stage_name: The name of the current stage.
        __current_stage: The current stage object.
    """

    def __init__(
        self,
        settings: ExperimentConfig,
        final: PipelineStage = PipelineStage.DIAGNOSE,
        context: RunContext | None = None,
    ) -> None:
        """Initializes the manager and enters the forward stage."""
        self.__stages = {
            PipelineStage.FORWARD: Forward(settings),
            PipelineStage.OBSERVE: Observe(settings),
            PipelineStage.RECONSTRUCT: Reconstruct(settings),
            PipelineStage.DIAGNOSE: Diagnose(settings),
        }
        self.__final = final
        self.__current_stage_name = PipelineStage.FORWARD
        self.__current_stage = self.__stages[self.__current_stage_name]
        self.__current_stage.enter(RunContext() if context is None else context)
        self.__finished = False

    @property
    def finished(self) -> bool:
        """Whether the final stage is done."""
        return self.__finished

    @property
    def current(self) -> PipelineStage:
        return self.__current_stage_name

    def update(self) -> None:
        """Runs the current stage, then moves on to the next one.

        Should be called until `finished` is set.
        """
        self.__current_stage.update()
        if not self.__current_stage.done:
            return
        if self.__current_stage_name is self.__final or self.__current_stage.next_stage is PipelineStage.NONE:
            self.__finished = True
        else:
            self.__change_stage()

    def release(self) -> RunContext:
        """Releases the current stage and returns the context of the run."""
        self.__current_stage.release()
        return self.__current_stage.exit()

    def __change_stage(self) -> None:
        context = self.__current_stage.exit()
        logger.info(f"Changing stage from {self.__current_stage_name} to {self.__current_stage.next_stage}")
        logger.debug(f"Context: {sorted(context.data)}")
        previous_stage = self.__current_stage_name
        self.__current_stage_name = self.__current_stage.next_stage
        self.__current_stage = self.__stages[self.__current_stage_name]
        self.__current_stage.previous_stage = previous_stage
        self.__current_stage.enter(context)
