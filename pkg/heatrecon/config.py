"""Module for configuration management following the singleton pattern."""

from __future__ import annotations

import copy
import json
import sys
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from loguru import logger

from heatrecon.errors import IoError


@lru_cache
def get_cfg(*args: str) -> Any:
    """Helper method to get a configuration value using a path of keys.

    Example:
        get_cfg("grid", "nx") -> 16
        get_cfg("weights", "kind") -> "carleman_c"

    Args:
        *args: The keys of the configuration path.
    """
    try:
        data = Config.get_instance().data
        for arg in args:
            data = data[arg]
        return data
    except KeyError as e:
        logger.error(f"Configuration key not found: {e} (from path: {args})")
        raise


def set_cfg(*args: str, value: Any) -> None:
    """Helper method to set a configuration value using a path of keys.

    Example:
        set_cfg("grid", "nx", value=32)
        set_cfg("observation", "seed", value=7)

    Args:
        *args: The keys of the configuration path.
        value: The value to set.
    """
    try:
        get_cfg.cache_clear()
        data = Config.get_instance().data
        for arg in args[:-1]:
            data = data[arg]
        data[args[-1]] = value
    except KeyError as e:
        logger.error(f"Configuration key not found: {e} (from path: {args})")
        raise


def merge(base: dict, override: dict) -> dict:
    """Returns a deep copy of `base` updated recursively with `override`."""

    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class Config:
    """Singleton class for configuration management.

    The packaged defaults are always loaded first; `load` overlays a user file on top of them.

    Attributes:
        __instance: The singleton instance of the class.
        __internal_path: The resource package holding the default configuration.
        __filename: The name of the default configuration file.
        __settings: The configuration settings.
        __source: The user file currently overlaid, if any.
    """

    __instance = None  # private class variable (not instance variable)
    __internal_path = "config"
    __filename = "config.json"
    __settings: dict = {}
    __source: Path | None = None

    @classmethod
    def get_instance(cls) -> Config:
        """Get the singleton instance."""

        return cls.__instance if cls.__instance is not None else cls()

    def __init__(self) -> None:
        """Create the singleton instance."""

        if Config.__instance is not None:
            raise RuntimeError("A singleton does not allow multiple instances. Use get_instance() instead.")

        Config.__instance = self
        self.__load_config()

    @property
    def data(self) -> dict:
        """Get the configuration settings."""

        return self.__settings

    @data.setter
    def data(self, values: dict) -> None:
        """Set the configuration settings."""

        get_cfg.cache_clear()
        self.__settings = values

    @property
    def source(self) -> Path | None:
        """The user configuration file overlaid on the defaults."""

        return self.__source

    def reload(self) -> None:
        """Reload the defaults, then the user file if one was loaded."""

        self.__load_config()
        if self.__source is not None:
            self.load(self.__source)

    def reset(self) -> None:
        """Drop any user overlay and go back to the packaged defaults."""

        self.__source = None
        self.__load_config()

    def load(self, file_path: Path | str) -> None:
        """Overlay a user configuration file on the packaged defaults.

        Args:
            file_path: path of a JSON file with any subset of the default sections.

        Raises:
            IoError: if the file cannot be read or is not valid JSON.
        """
        file_path = Path(file_path)
        self.__load_config()
        override = self.__read_json(file_path)
        self.data = merge(self.__settings, override)
        self.__source = file_path

    def __get_internal_path(self) -> Path:
        """Get the internal path of the configuration file."""

        return Path(str(resources.files(Config.__internal_path).joinpath(Config.__filename)))

    def __load_config(self) -> None:
        """Reload the configuration from the packaged file."""

        file_path = self.__get_internal_path()
        self.data = self.__read_json(file_path)

    @staticmethod
    def __read_json(file_path: Path) -> dict:
        """Read a configuration file."""

        logger.info(f"Loading configuration from: {file_path}")

        try:
            with open(file_path, encoding="utf_8") as file:
                return json.load(file)
        except (OSError, json.JSONDecodeError) as e:
            raise IoError(f"cannot read configuration {file_path}: {e}") from e


def main() -> int:
    """Print the resolved configuration, optionally overlaid with the file given as first argument."""

    config = Config.get_instance()
    if len(sys.argv) > 1:
        config.load(sys.argv[1])
    print(json.dumps(config.data, indent=4, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
