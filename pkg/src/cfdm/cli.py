"""Command-line interface: generate, embed, benchmark, evaluate.

Exit codes: 0 success, 2 usage error, 1 runtime error. Progress is
reported on stderr as machine-parsable ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import DatasetConfig, ExperimentConfig, run_config, sweep, write_results
from .datasets import generate_swiss_roll, load_dataset
from .embedding import Embedding, align_embeddings
from .errors import CfdmError, ConfigError
from .kernels import suggest_epsilon
from .pipeline import METHODS, run_method


def _progress(**fields) -> None:
    print(" ".join(f"{key}={value}" for key, value in fields.items()), file=sys.stderr)


def _write_embedding_csv(path, coordinates: np.ndarray) -> None:
    np.savetxt(path, coordinates, fmt="%.17g", delimiter=",")


def _cmd_generate(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if args.noise < 0:
        parser.error("--noise must be non-negative")
    roll = generate_swiss_roll(args.n, args.noise, args.seed)
    _write_embedding_csv(args.out, roll.data.values)
    print(f"{roll.data.n} rows written to {args.out}")
    return 0


def _cmd_embed(args, parser) -> int:
    if args.components < 1:
        parser.error("--components must be a positive integer")
    if args.partitions < 1:
        parser.error("--partitions must be a positive integer")
    data = load_dataset(args.input)
    epsilon = args.epsilon if args.epsilon is not None else suggest_epsilon(data, args.knn)
    run = run_method(
        args.method,
        data,
        epsilon=epsilon,
        neighbors=args.knn,
        n_partitions=args.partitions,
        t=args.t,
        k=args.components,
        seed=args.seed,
        exact_dense=args.knn is None,
    )
    for phase, seconds in run.phase_seconds.items():
        _progress(phase=phase, seconds=f"{seconds:.6f}")
    out = Path(args.out)
    _write_embedding_csv(out, run.embedding.coordinates)
    meta = {
        "method": args.method,
        "input": str(args.input),
        "n": data.n,
        "k": args.components,
        "t": args.t,
        "epsilon": float(epsilon),
        "knn": args.knn,
        "partitions": args.partitions,
        "seed": args.seed,
        "eigenvalues": [float(v) for v in run.embedding.eigenvalues],
        "phase_seconds": run.phase_seconds,
        "metadata": run.metadata,
        "version": __version__,
    }
    meta_path = out.with_suffix(out.suffix + ".meta.json") if out.suffix else out.with_suffix(".meta.json")
    with open(meta_path, "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2)
        handle.write("\n")
    print(f"{data.n}x{run.embedding.k} embedding written to {out}")
    return 0


def _load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path} at byte offset {exc.pos}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return raw


def _cmd_benchmark(args, parser) -> int:
    raw = _load_config_file(args.config) if args.config else {}

    # CLI flags override file values which override defaults.
    dataset = dict(raw.get("dataset", {}))
    if args.dataset_csv is not None:
        dataset = {"kind": "csv", "path": args.dataset_csv}
    if args.swiss_n is not None:
        if args.dataset_csv is not None:
            parser.error("--swiss-n and --dataset-csv are mutually exclusive")
        dataset.setdefault("kind", "swiss-roll")
        dataset.pop("path", None)
        dataset["n"] = args.swiss_n
    if args.swiss_noise is not None:
        dataset["noise"] = args.swiss_noise
    if args.swiss_seed is not None:
        dataset["seed"] = args.swiss_seed
    if not dataset:
        parser.error("a dataset is required: --config, --dataset-csv, or --swiss-n")
    raw["dataset"] = dataset

    overrides = {
        "n_partitions": args.partitions,
        "k": args.components,
        "t": args.t,
        "epsilon": args.epsilon,
        "neighbors": args.knn,
        "repeats": args.repeats,
        "seed": args.seed,
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    if args.methods is not None:
        raw["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.store_embeddings:
        raw["store_embeddings"] = True
    if args.exact_sparse:
        raw["exact_dense"] = False

    cfg = ExperimentConfig.from_dict(raw)
    n_grid = [int(v) for v in args.grid_n.split(",")] if args.grid_n else None
    partitions_grid = (
        [int(v) for v in args.grid_partitions.split(",")] if args.grid_partitions else None
    )
    if n_grid or partitions_grid:
        records = sweep(cfg, n_grid=n_grid, partitions_grid=partitions_grid)
    else:
        records = run_config(cfg)
    for index, record in enumerate(records):
        for outcome in record.methods:
            _progress(
                record=index,
                method=outcome.method,
                seconds=f"{outcome.total_seconds:.6f}",
                sse="" if outcome.sse is None else f"{outcome.sse:.6g}",
                error=outcome.error or "",
            )
    csv_path = write_results(records, args.out_dir)
    print(f"{len(records)} records written to {args.out_dir} ({csv_path.name})")
    return 0


def _read_embedding_csv(path) -> Embedding:
    data = load_dataset(path)
    coords = data.values
    return Embedding(coords, np.ones(coords.shape[1]), 0.0, "points")


def _cmd_evaluate(args, parser) -> int:
    reference = _read_embedding_csv(args.reference)
    candidate = _read_embedding_csv(args.candidate)
    report, _ = align_embeddings(reference, candidate)
    payload = {
        "reference": str(args.reference),
        "candidate": str(args.candidate),
        "permutation": [int(v) for v in report.permutation],
        "signs": [int(v) for v in report.signs],
        "total_sse": report.total_sse,
        "total_mse": report.total_mse,
        "per_point_error": [float(v) for v in report.per_point_error],
        "excluded_components": report.excluded_components,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    print(f"sse={report.total_sse:.12g} mse={report.total_mse:.12g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfdm",
        description="Compression-based fast diffusion maps: generation, embedding, benchmarking, evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"cfdm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a Swiss-roll CSV dataset")
    gen.add_argument("--n", type=int, required=True, help="number of points")
    gen.add_argument("--noise", type=float, default=0.0, help="Gaussian noise scale per coordinate")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output CSV path")

    embed = sub.add_parser("embed", help="embed a CSV dataset with one method")
    embed.add_argument("--method", choices=METHODS, required=True)
    embed.add_argument("--input", required=True, help="input CSV dataset")
    embed.add_argument("--partitions", type=int, default=150, help="regions (cfdm) or landmarks (baselines)")
    embed.add_argument("--components", type=int, default=32, help="embedding components")
    embed.add_argument("--t", type=float, default=1.0, help="diffusion time")
    embed.add_argument("--epsilon", type=float, default=None, help="kernel bandwidth (squared distance)")
    embed.add_argument("--knn", type=int, default=None, help="kNN kernel sparsification")
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--out", required=True, help="output embedding CSV; metadata JSON written alongside")

    bench = sub.add_parser("benchmark", help="run a benchmark config or sweep")
    bench.add_argument("--config", default=None, help="JSON experiment configuration")
    bench.add_argument("--dataset-csv", default=None, help="benchmark an external CSV dataset")
    bench.add_argument("--swiss-n", type=int, default=None, help="Swiss-roll point count")
    bench.add_argument("--swiss-noise", type=float, default=None)
    bench.add_argument("--swiss-seed", type=int, default=None)
    bench.add_argument("--methods", default=None, help="comma-separated method list")
    bench.add_argument("--partitions", type=int, default=None)
    bench.add_argument("--components", type=int, default=None)
    bench.add_argument("--t", type=float, default=None)
    bench.add_argument("--epsilon", type=float, default=None)
    bench.add_argument("--knn", type=int, default=None)
    bench.add_argument("--repeats", type=int, default=None)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--grid-n", default=None, help="comma-separated dataset sizes")
    bench.add_argument("--grid-partitions", default=None, help="comma-separated partition counts")
    bench.add_argument("--store-embeddings", action="store_true")
    bench.add_argument(
        "--exact-sparse",
        action="store_true",
        help="let the exact method use the kNN kernel instead of the dense one",
    )
    bench.add_argument("--out-dir", required=True)

    ev = sub.add_parser("evaluate", help="align two embedding CSVs and report SSE/MSE")
    ev.add_argument("--reference", required=True)
    ev.add_argument("--candidate", required=True)
    ev.add_argument("--out", default=None, help="alignment report JSON")

    return parser


_HANDLERS = {
    "generate": _cmd_generate,
    "embed": _cmd_embed,
    "benchmark": _cmd_benchmark,
    "evaluate": _cmd_evaluate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args, parser)
    except (CfdmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
