"""Module for the observation stage."""

from loguru import logger

from heatrecon.constants import OBSERVATION_FILE
from heatrecon.enums.stages import PipelineStage
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.observe.observation import ObservationSet, make_observation
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.forward import Truth
from heatrecon.stages.stage import Stage


def synthesize(
    settings: ExperimentConfig, truth: Truth, grid: SpaceTimeGrid, quadrature: QuadratureSet
) -> ObservationSet:
    """Samples the truth on q_T at the quadrature points of the reconstruction grid, with the configured noise."""

    block = settings.observation
    return make_observation(truth.y, block.omega, grid, quadrature, block.sigma, block.seed)


class Observe(Stage):
    """Synthesizes the observation, or reads it from the file named `observation_file` in the context."""

    def __init__(self, settings: ExperimentConfig) -> None:
        super().__init__(settings)
        self.next_stage = PipelineStage.RECONSTRUCT

    def update(self) -> None:
        data = self.context.data
        source = data.get("observation_file")
        if source is None:
            obs = synthesize(self.settings, data["truth"], data["grid"], data["quadrature"])
        else:
            logger.info(f"Reading the observation from {source}")
            obs = ObservationSet.load(source, data["quadrature"])
        obs.save(self.settings.output.directory / OBSERVATION_FILE, data["quadrature"])

        self.context.set_data(obs=obs)
        self.context.add_report(
            omega_a=obs.omega[0], omega_b=obs.omega[1], samples=obs.n_samples, sigma=obs.sigma, seed=obs.seed
        )
        self.done = True
