"""Module for the PipelineStage enum class."""

from enum import Enum


class PipelineStage(Enum):
    """Represents the stages of an experiment run.

    Attributes:
        NONE: no further stage, the run is over.
        FORWARD: ground-truth generation on the fine grid.
        OBSERVE: synthesis of the observation on q_T.
        RECONSTRUCT: assembly and solve of the selected formulation.
        DIAGNOSE: weighted norms, inf-sup and consistency checks.
    """

    NONE = -1
    FORWARD = 0
    OBSERVE = 1
    RECONSTRUCT = 2
    DIAGNOSE = 3
