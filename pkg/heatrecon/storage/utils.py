"""Module for atomic writes and reads of run artifacts."""

from __future__ import annotations

import json
import os
import tempfile
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from loguru import logger

from heatrecon.constants import FLOAT_FORMAT
from heatrecon.errors import IoError


def _atomic_write(path: Path, writer) -> None:
    """Writes through a temporary file in the same directory, then renames it over `path`."""

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf_8", newline="\n") as file:
                writer(file)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    logger.debug(f"Wrote {path}")


def write_csv(path: Path, columns: Sequence[str], data: np.ndarray) -> None:
    """Writes a float table with a header line and 17 significant digits.

    Args:
        path: destination file.
        columns: column names.
        data: array of shape (n_rows, len(columns)).
    """
    data = np.asarray(data, dtype=float).reshape(-1, len(columns))

    def writer(file) -> None:
        file.write(",".join(columns) + "\n")
        for row in data:
            file.write(",".join(format(value, FLOAT_FORMAT) for value in row) + "\n")

    _atomic_write(path, writer)


def read_csv(path: Path, columns: Sequence[str]) -> np.ndarray:
    """Reads a table written by `write_csv`, checking its header.

    Raises:
        IoError: if the file cannot be read, has another header or holds non-numeric data.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf_8") as file:
            header = file.readline().strip()
            if header.split(",") != list(columns):
                raise IoError(f"{path}: expected columns {','.join(columns)}, found {header}")
            data = np.loadtxt(file, delimiter=",", ndmin=2)
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    except ValueError as e:
        raise IoError(f"malformed table {path}: {e}") from e
    if data.size == 0:
        return np.zeros((0, len(columns)))
    if data.shape[1] != len(columns):
        raise IoError(f"{path}: expected {len(columns)} columns, found {data.shape[1]}")
    return data


def write_json(path: Path, payload: dict) -> None:
    """Writes a JSON document with sorted keys."""

    _atomic_write(path, lambda file: file.write(json.dumps(payload, indent=4, sort_keys=True) + "\n"))


def read_json(path: Path) -> dict:
    """Reads a JSON document written by `write_json`.

    Raises:
        IoError: if the file cannot be read or is not valid JSON.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf_8") as file:
            return json.load(file)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read {path}: {e}") from e


def write_report(path: Path, entries: dict) -> None:
    """Writes `key: value` lines in insertion order; floats use 17 significant digits."""

    def render(value) -> str:
        if isinstance(value, float):
            return format(value, FLOAT_FORMAT)
        return str(value)

    _atomic_write(path, lambda file: file.write("".join(f"{key}: {render(value)}\n" for key, value in entries.items())))
