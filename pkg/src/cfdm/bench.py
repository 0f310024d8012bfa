"""Experiment configuration, timed runs, result records, and serialization.

A ResultRecord captures one experiment (one dataset instantiation) with a
per-method breakdown; records serialize to JSON documents and aggregate
into a flat results.csv with one row per (record, method).
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .datasets import generate_swiss_roll, load_dataset
from .embedding import align_embeddings
from .errors import CfdmError, ConfigError
from .kernels import suggest_epsilon
from .pipeline import METHOD_EXACT, METHODS, PHASES, run_method

RESULT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class DatasetConfig:
    """Either a seeded Swiss roll or an external CSV file."""

    kind: str  # "swiss-roll" | "csv"
    n: Optional[int] = None
    noise: float = 0.0
    seed: int = 0
    path: Optional[str] = None

    def validate(self) -> None:
        if self.kind == "swiss-roll":
            if self.path is not None:
                raise ConfigError("dataset.path is only valid for csv datasets", field="dataset.path")
            if self.n is None or self.n < 1:
                raise ConfigError("dataset.n must be a positive integer", field="dataset.n")
            if self.noise < 0:
                raise ConfigError("dataset.noise must be non-negative", field="dataset.noise")
        elif self.kind == "csv":
            if self.path is None:
                raise ConfigError("dataset.path is required for csv datasets", field="dataset.path")
            if self.n is not None:
                raise ConfigError(
                    "dataset.n and dataset.path are mutually exclusive", field="dataset.n"
                )
        else:
            raise ConfigError(
                f"dataset.kind must be 'swiss-roll' or 'csv', got {self.kind!r}",
                field="dataset.kind",
            )


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark cell: dataset, method list, and shared parameters."""

    dataset: DatasetConfig
    methods: Sequence[str] = ("exact", "cfdm")
    n_partitions: int = 150
    k: int = 32
    t: float = 1.0
    epsilon: Optional[float] = None
    neighbors: Optional[int] = None
    exact_dense: bool = True
    repeats: int = 1
    seed: int = 0
    store_embeddings: bool = False
    store_per_point_errors: bool = True

    def validate(self) -> None:
        self.dataset.validate()
        if not self.methods:
            raise ConfigError("methods must be non-empty", field="methods")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(
                    f"unknown method {method!r}; expected one of {METHODS}", field="methods"
                )
        for name in ("n_partitions", "k", "repeats"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer", field=name)
        if self.t < 0:
            raise ConfigError("t must be non-negative", field="t")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError("epsilon must be positive", field="epsilon")
        if self.neighbors is not None and self.neighbors < 1:
            raise ConfigError("neighbors must be a positive integer", field="neighbors")

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["methods"] = list(self.methods)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        data = dict(raw)
        dataset_raw = data.pop("dataset", None)
        if dataset_raw is None:
            raise ConfigError("dataset section is required", field="dataset")
        if not isinstance(dataset_raw, dict):
            raise ConfigError("dataset must be an object", field="dataset")
        known_dataset = {f.name for f in dataclasses.fields(DatasetConfig)}
        for key in dataset_raw:
            if key not in known_dataset:
                raise ConfigError(f"unknown dataset field {key!r}", field=f"dataset.{key}")
        dataset = DatasetConfig(**dataset_raw)
        known = {f.name for f in dataclasses.fields(cls)} - {"dataset"}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown configuration field {key!r}", field=key)
        try:
            cfg = cls(dataset=dataset, **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg


@dataclass
class MethodOutcome:
    """Per-method timings and error statistics within one record."""

    method: str
    phase_seconds: Dict[str, float] = field(default_factory=dict)
    total_seconds: float = 0.0
    sse: Optional[float] = None
    mse: Optional[float] = None
    per_point_error: Optional[List[float]] = None
    error: Optional[str] = None
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "MethodOutcome":
        return cls(**raw)


@dataclass
class ResultRecord:
    """One experiment: config echo, shared dimensions, per-method outcomes."""

    config: dict
    n: int
    k: int
    t: float
    n_partitions: int
    seed: int
    methods: List[MethodOutcome] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)
    embeddings: Optional[Dict[str, np.ndarray]] = field(default=None, compare=False, repr=False)

    def outcome(self, method: str) -> Optional[MethodOutcome]:
        for entry in self.methods:
            if entry.method == method:
                return entry
        return None

    def to_json_dict(self) -> dict:
        return {
            "schema_version": RESULT_SCHEMA_VERSION,
            "config": self.config,
            "n": self.n,
            "k": self.k,
            "t": self.t,
            "n_partitions": self.n_partitions,
            "seed": self.seed,
            "methods": [m.to_dict() for m in self.methods],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "ResultRecord":
        data = dict(raw)
        data.pop("schema_version", None)
        methods = [MethodOutcome.from_dict(m) for m in data.pop("methods", [])]
        return cls(methods=methods, **data)


def _instantiate_dataset(dataset: DatasetConfig, repeat_index: int):
    if dataset.kind == "swiss-roll":
        roll = generate_swiss_roll(dataset.n, dataset.noise, dataset.seed + repeat_index)
        return roll.data
    return load_dataset(dataset.path)


def run_experiment(cfg: ExperimentConfig, repeat_index: int = 0) -> ResultRecord:
    """Run every configured method on one dataset instantiation.

    The exact method (when requested) runs first and serves as the
    alignment reference for the other methods' SSE/MSE. A failing method
    is recorded with its error message without aborting the record.
    """
    cfg.validate()
    data = _instantiate_dataset(cfg.dataset, repeat_index)
    seed = cfg.seed + repeat_index

    start = time.perf_counter()
    epsilon = cfg.epsilon if cfg.epsilon is not None else suggest_epsilon(data, cfg.neighbors)
    epsilon_seconds = time.perf_counter() - start

    ordered = sorted(dict.fromkeys(cfg.methods), key=lambda m: m != METHOD_EXACT)
    record = ResultRecord(
        config=cfg.to_dict(),
        n=data.n,
        k=cfg.k,
        t=cfg.t,
        n_partitions=cfg.n_partitions,
        seed=seed,
        metadata={
            "version": __version__,
            "epsilon": float(epsilon),
            "epsilon_selection_seconds": epsilon_seconds,
            "repeat_index": repeat_index,
            "error_metric": "sse over aligned eigenvalue-scaled coordinates at configured t",
            "alignment": "hungarian assignment on absolute pearson correlation, signs from correlation",
            "interpolation": "row-normalized region-to-point transition weights",
        },
        embeddings={} if cfg.store_embeddings else None,
    )

    reference = None
    for method in ordered:
        outcome = MethodOutcome(method=method)
        begin = time.perf_counter()
        try:
            run = run_method(
                method,
                data,
                epsilon=epsilon,
                neighbors=cfg.neighbors,
                n_partitions=cfg.n_partitions,
                t=cfg.t,
                k=cfg.k,
                seed=seed,
                exact_dense=cfg.exact_dense,
            )
        except (CfdmError, np.linalg.LinAlgError, MemoryError) as exc:
            outcome.error = f"{type(exc).__name__}: {exc}"
            outcome.total_seconds = time.perf_counter() - begin
            record.methods.append(outcome)
            continue
        outcome.total_seconds = time.perf_counter() - begin
        outcome.phase_seconds = {phase: run.phase_seconds.get(phase, 0.0) for phase in PHASES}
        outcome.metadata = dict(run.metadata)
        if method == METHOD_EXACT:
            reference = run.embedding
        elif reference is not None:
            try:
                report, _ = align_embeddings(reference, run.embedding)
            except CfdmError as exc:
                outcome.error = f"alignment failed: {type(exc).__name__}: {exc}"
            else:
                outcome.sse = report.total_sse
                outcome.mse = report.total_mse
                if cfg.store_per_point_errors:
                    outcome.per_point_error = [float(v) for v in report.per_point_error]
                if report.excluded_components:
                    outcome.metadata["alignment_warnings"] = list(report.excluded_components)
        if record.embeddings is not None:
            record.embeddings[method] = run.embedding.coordinates
        record.methods.append(outcome)
    return record


def run_config(cfg: ExperimentConfig) -> List[ResultRecord]:
    """All repeats of one configuration, with seed offsets per repeat."""
    return [run_experiment(cfg, r) for r in range(cfg.repeats)]


def sweep(
    base: ExperimentConfig,
    n_grid: Optional[Sequence[int]] = None,
    partitions_grid: Optional[Sequence[int]] = None,
    methods_grid: Optional[Sequence[Sequence[str]]] = None,
) -> List[ResultRecord]:
    """Cartesian product over dataset size, partition count, and method set."""
    if base.dataset.kind != "swiss-roll" and n_grid:
        raise ConfigError("n_grid requires a swiss-roll dataset", field="dataset.kind")
    ns = list(n_grid) if n_grid else [None]
    partitions = list(partitions_grid) if partitions_grid else [None]
    method_sets = [list(m) for m in methods_grid] if methods_grid else [None]
    records: List[ResultRecord] = []
    for n, n_parts, methods in itertools.product(ns, partitions, method_sets):
        cfg = base
        if n is not None:
            cfg = dataclasses.replace(cfg, dataset=dataclasses.replace(cfg.dataset, n=int(n)))
        if n_parts is not None:
            cfg = dataclasses.replace(cfg, n_partitions=int(n_parts))
        if methods is not None:
            cfg = dataclasses.replace(cfg, methods=methods)
        for record in run_config(cfg):
            record.metadata["grid_cell"] = {
                "n": n,
                "n_partitions": n_parts,
                "methods": methods,
            }
            records.append(record)
    return records


CSV_COLUMNS = (
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


def write_results(records: Sequence[ResultRecord], out_dir) -> Path:
    """Write one JSON document per record plus the aggregate results.csv.

    Embeddings attached to a record are written as CSV, one row per
    subject and one column per component. Returns the results.csv path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for index, record in enumerate(records):
        path = out / f"record_{index:04d}.json"
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(record.to_json_dict(), handle, indent=2)
            handle.write("\n")
        if record.embeddings:
            for method, coords in record.embeddings.items():
                np.savetxt(out / f"embedding_{index:04d}_{method}.csv", coords, fmt="%.17g", delimiter=",")
    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for index, record in enumerate(records):
            for outcome in record.methods:
                phases = outcome.phase_seconds or {}
                writer.writerow(
                    [
                        index,
                        record.n,
                        record.n_partitions,
                        record.k,
                        record.t,
                        record.seed,
                        outcome.method,
                        f"{outcome.total_seconds:.6f}",
                        f"{phases.get('partitioning', 0.0):.6f}",
                        f"{phases.get('kernel', 0.0):.6f}",
                        f"{phases.get('eigensolve', 0.0):.6f}",
                        f"{phases.get('interpolation', 0.0):.6f}",
                        "" if outcome.sse is None else f"{outcome.sse:.12g}",
                        "" if outcome.mse is None else f"{outcome.mse:.12g}",
                        outcome.error or "",
                    ]
                )
    return csv_path


def read_record(path) -> ResultRecord:
    """Parse a single JSON record document."""
    with open(path, encoding="utf-8") as handle:
        return ResultRecord.from_json_dict(json.load(handle))
