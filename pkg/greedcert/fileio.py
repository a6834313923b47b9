"""
File helpers shared by the CLI, the scripts and the explorer.

Matrices and vectors are header-less CSV (one matrix row per line, vectors as
a single column or a single row). Floats are written with their shortest
round-trip representation, so reading a file back gives the same doubles.
JSON reports go through `write_json`, which also understands numpy scalars
and arrays.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from greedcert.errors import InvalidDimensions, ResultIOError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_matrix_csv(path: PathLike) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None)
    except OSError as exc:
        raise ResultIOError(f"cannot read {path}: {exc}") from exc
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise InvalidDimensions(f"{path} is not a numeric CSV matrix: {exc}") from exc
    try:
        return frame.to_numpy(dtype=float)
    except ValueError as exc:
        raise InvalidDimensions(f"{path} holds non-numeric entries") from exc


def read_vector_csv(path: PathLike) -> np.ndarray:
    matrix = read_matrix_csv(path)
    if min(matrix.shape) != 1:
        raise InvalidDimensions(f"{path} holds a {matrix.shape} matrix, expected a vector")
    return matrix.reshape(-1)


def write_matrix_csv(path: PathLike, matrix) -> None:
    frame = pd.DataFrame(np.atleast_2d(np.asarray(matrix, dtype=float)))
    try:
        frame.to_csv(path, header=False, index=False, lineterminator="\n")
    except OSError as exc:
        raise ResultIOError(f"cannot write {path}: {exc}") from exc


def write_vector_csv(path: PathLike, vector) -> None:
    write_matrix_csv(path, np.asarray(vector, dtype=float).reshape(-1, 1))


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, default=_to_builtin)


def write_json(path: PathLike, payload) -> None:
    try:
        Path(path).write_text(dumps(payload) + "\n")
    except OSError as exc:
        raise ResultIOError(f"cannot write {path}: {exc}") from exc
    logger.debug("wrote %s", path)
