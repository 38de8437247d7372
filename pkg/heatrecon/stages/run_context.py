"""Module for the data shared between the stages of a run."""

from typing import Any


class RunContext:
    """Represents the data passed from one stage of a run to the next.

    The stages are entered with a RunContext object. Each stage stores what later stages need with
    `set_data` (the grid, the truth, the observation, the reconstruction, ...), and reads what earlier
    stages stored through the `data` property. The `report` entries are collected into the run report.

    Attributes:
        __data: A dictionary to store the context data.
        __report: The scalar entries of the run report, in insertion order.
    """

    def __init__(self, **kwargs: Any) -> None:
        self.__data: dict = dict(kwargs)
        self.__report: dict = {}

    def set_data(self, **kwargs: Any) -> None:
        """Sets the context data."""
        self.__data.update(**kwargs)

    @property
    def data(self) -> dict:
        """Returns the context data."""
        return self.__data

    def add_report(self, **entries: Any) -> None:
        """Adds entries to the run report."""
        self.__report.update(**entries)

    @property
    def report(self) -> dict:
        """Returns the run report entries."""
        return self.__report
