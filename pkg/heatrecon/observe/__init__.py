"""Observations on the subcylinder q_T and the weighted misfit."""

from heatrecon.observe.observation import ObservationSet, make_observation, weighted_misfit

__all__ = ["ObservationSet", "make_observation", "weighted_misfit"]
