"""Parsing layer for benchmark output files.

This module performs no arithmetic: values are read, type-cast, and
validated only, so every number handed to the plotting layer originates
verbatim from an input file. A lint test enforces the no-arithmetic rule
on this module's AST.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import List, Optional


class SchemaError(ValueError):
    """An input file does not match the benchmark output schema."""


RESULTS_COLUMNS = (
    "record",
    "n",
    "n_partitions",
    "k",
    "t",
    "seed",
    "method",
    "total_seconds",
    "partitioning_seconds",
    "kernel_seconds",
    "eigensolve_seconds",
    "interpolation_seconds",
    "sse",
    "mse",
    "error",
)


@dataclass(frozen=True)
class ResultRow:
    record: int
    n: int
    n_partitions: int
    k: int
    t: float
    seed: int
    method: str
    total_seconds: float
    partitioning_seconds: float
    kernel_seconds: float
    eigensolve_seconds: float
    interpolation_seconds: float
    sse: Optional[float]
    mse: Optional[float]
    error: str


def _cell_float(value: str, line: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SchemaError(f"line {line}: column {column!r} is not numeric: {value!r}") from None


def _cell_int(value: str, line: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SchemaError(f"line {line}: column {column!r} is not an integer: {value!r}") from None


def read_results_csv(path) -> List[ResultRow]:
    """Rows of an aggregate results.csv, one per (record, method)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: file is empty")
        missing = [name for name in RESULTS_COLUMNS if name not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows: List[ResultRow] = []
        for line, raw in enumerate(reader, start=2):
            if any(raw.get(name) is None for name in RESULTS_COLUMNS):
                raise SchemaError(f"{path}: line {line} is ragged")
            rows.append(
                ResultRow(
                    record=_cell_int(raw["record"], line, "record"),
                    n=_cell_int(raw["n"], line, "n"),
                    n_partitions=_cell_int(raw["n_partitions"], line, "n_partitions"),
                    k=_cell_int(raw["k"], line, "k"),
                    t=_cell_float(raw["t"], line, "t"),
                    seed=_cell_int(raw["seed"], line, "seed"),
                    method=raw["method"],
                    total_seconds=_cell_float(raw["total_seconds"], line, "total_seconds"),
                    partitioning_seconds=_cell_float(
                        raw["partitioning_seconds"], line, "partitioning_seconds"
                    ),
                    kernel_seconds=_cell_float(raw["kernel_seconds"], line, "kernel_seconds"),
                    eigensolve_seconds=_cell_float(
                        raw["eigensolve_seconds"], line, "eigensolve_seconds"
                    ),
                    interpolation_seconds=_cell_float(
                        raw["interpolation_seconds"], line, "interpolation_seconds"
                    ),
                    sse=None if raw["sse"] == "" else _cell_float(raw["sse"], line, "sse"),
                    mse=None if raw["mse"] == "" else _cell_float(raw["mse"], line, "mse"),
                    error=raw["error"],
                )
            )
    if not rows:
        raise SchemaError(f"{path}: results table has no rows")
    return rows


def read_embedding_csv(path) -> List[List[float]]:
    """An embedding matrix: one row per subject, one column per component."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows: List[List[float]] = []
        width: Optional[int] = None
        for line, raw in enumerate(reader, start=1):
            if not raw:
                continue
            if width is None:
                width = len(raw)
            if len(raw) != width:
                raise SchemaError(f"{path}: line {line} has {len(raw)} columns, expected {width}")
            rows.append([_cell_float(cell, line, f"c{index}") for index, cell in enumerate(raw)])
    if not rows:
        raise SchemaError(f"{path}: embedding file has no rows")
    if len(rows[0]) < 2:
        raise SchemaError(f"{path}: need at least two components to draw a scatter")
    return rows


def read_record_json(path) -> dict:
    """A single benchmark record document."""
    with open(path, encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: malformed JSON at byte offset {exc.pos}: {exc.msg}") from None
    if not isinstance(raw, dict) or "methods" not in raw:
        raise SchemaError(f"{path}: not a benchmark record document")
    return raw


def method_entry(record: dict, method: str) -> dict:
    for entry in record.get("methods", []):
        if entry.get("method") == method:
            return entry
    known = [entry.get("method") for entry in record.get("methods", [])]
    raise SchemaError(f"record has no method {method!r}; found {known}")


def per_point_errors(record: dict, method: str) -> Optional[List[float]]:
    """The stored per-point error vector, or None when absent."""
    entry = method_entry(record, method)
    values = entry.get("per_point_error")
    if values is None:
        return None
    if not isinstance(values, list):
        raise SchemaError(f"per_point_error of {method!r} is not a list")
    return [float(v) for v in values]


def total_sse(record: dict, method: str) -> Optional[float]:
    entry = method_entry(record, method)
    value = entry.get("sse")
    return None if value is None else float(value)
