"""Dataset generation and CSV ingestion for the benchmark harness."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, ParameterError
from .kernels import DataMatrix

ROLL_ANGLE_LOW = 3.0 * np.pi / 2.0
ROLL_ANGLE_HIGH = 9.0 * np.pi / 2.0
ROLL_HEIGHT = 21.0


@dataclass(frozen=True, eq=False)
class SwissRoll:
    """Sampled Swiss roll with its intrinsic parameters kept for diagnostics."""

    data: DataMatrix
    angle: np.ndarray
    height: np.ndarray


def generate_swiss_roll(n: int, noise: float = 0.0, seed: int = 0) -> SwissRoll:
    """Sample n points from the Swiss roll (u cos u, h, u sin u).

    The roll angle u is uniform on [3 pi / 2, 9 pi / 2] and the height h
    uniform on [0, 21]; isotropic Gaussian noise of scale ``noise`` is
    added per coordinate. Deterministic given the seed.
    """
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if noise < 0.0:
        raise ParameterError(f"noise must be non-negative, got {noise}")
    rng = np.random.default_rng(seed)
    angle = rng.uniform(ROLL_ANGLE_LOW, ROLL_ANGLE_HIGH, n)
    height = rng.uniform(0.0, ROLL_HEIGHT, n)
    points = np.column_stack([angle * np.cos(angle), height, angle * np.sin(angle)])
    if noise > 0.0:
        points = points + rng.normal(0.0, noise, points.shape)
    return SwissRoll(DataMatrix.from_array(points), angle, height)


def _is_numeric_row(cells) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return False
    return True


def load_dataset(path) -> DataMatrix:
    """Read a numeric CSV into a DataMatrix.

    A single non-numeric first row is treated as a header. Ragged rows and
    unparseable cells raise DatasetError naming the file line and column.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = [(index + 1, row) for index, row in enumerate(reader) if row]
    if not rows:
        raise DatasetError(f"{path}: file contains no data")
    start = 0
    if not _is_numeric_row(rows[0][1]):
        start = 1
        if len(rows) == 1:
            raise DatasetError(f"{path}: file contains only a header row")
    width = len(rows[start][1])
    values = np.empty((len(rows) - start, width))
    for out_index, (line, row) in enumerate(rows[start:]):
        if len(row) != width:
            raise DatasetError(f"{path}: row {line} has {len(row)} columns, expected {width}")
        for col, cell in enumerate(row):
            try:
                values[out_index, col] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: row {line}, column {col + 1}: cannot parse {cell!r} as a number"
                ) from None
    return DataMatrix.from_array(values)
