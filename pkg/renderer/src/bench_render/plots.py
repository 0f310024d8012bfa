"""Figure construction from parsed benchmark values.

Deterministic styling (fixed figure sizes, no timestamps in metadata) so
repeated renders of the same inputs are byte-stable.
"""

from __future__ import annotations

import warnings
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import ResultRow, SchemaError

FIGURE_DPI = 110

# One fixed color per method so figures are comparable across runs.
METHOD_COLORS = {
    "exact": "#1f77b4",
    "cfdm": "#d62728",
    "nystrom": "#2ca02c",
    "centroid-interp": "#9467bd",
}


def _color(method: str) -> Optional[str]:
    return METHOD_COLORS.get(method)


def _save(fig, out_path) -> None:
    # Empty metadata keeps PNG/SVG output free of version/date stamps.
    fig.savefig(out_path, dpi=FIGURE_DPI, metadata={})
    plt.close(fig)


def render_scatter(
    embedding: List[List[float]],
    errors: Optional[Sequence[float]],
    out_path,
    landmarks: Optional[List[List[float]]] = None,
    total_error: Optional[float] = None,
    title: str = "diffusion embedding",
):
    """Scatter of the first two components, color-mapped by per-point error.

    Without an error vector the scatter is uncolored and a warning is
    emitted. Landmark coordinates, when given, are overlaid in green.
    """
    if errors is not None and len(errors) != len(embedding):
        raise SchemaError(
            f"error vector has {len(errors)} entries but the embedding has {len(embedding)} rows"
        )
    xs = [row[0] for row in embedding]
    ys = [row[1] for row in embedding]
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    if errors is None:
        warnings.warn("no per-point error vector; rendering uncolored scatter", RuntimeWarning)
        ax.scatter(xs, ys, s=6.0, color="#555555", linewidths=0)
    else:
        points = ax.scatter(xs, ys, s=6.0, c=list(errors), cmap="viridis", linewidths=0)
        fig.colorbar(points, ax=ax, label="per-point squared error")
    if landmarks is not None:
        ax.scatter(
            [row[0] for row in landmarks],
            [row[1] for row in landmarks],
            s=22.0,
            color="#2ca02c",
            marker="x",
            label="landmarks",
        )
        ax.legend(loc="best")
    if total_error is not None:
        ax.set_title(f"{title} (total error {total_error:.4g})")
    else:
        ax.set_title(title)
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    fig.tight_layout()
    _save(fig, out_path)
    return fig


def _rows_by_method(rows: Sequence[ResultRow], require_sse: bool):
    grouped = {}
    for row in rows:
        if row.error:
            continue
        if require_sse and row.sse is None:
            continue
        grouped.setdefault(row.method, []).append(row)
    if not grouped:
        raise SchemaError("no plottable rows in the results table")
    return grouped


def render_scaling(rows: Sequence[ResultRow], out_path):
    """Log-log wall-clock seconds against dataset size, one curve per method."""
    grouped = _rows_by_method(rows, require_sse=False)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for method in sorted(grouped):
        series = sorted(grouped[method], key=lambda r: (r.n, r.record))
        ax.plot(
            [row.n for row in series],
            [row.total_seconds for row in series],
            marker="o",
            label=method,
            color=_color(method),
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("points")
    ax.set_ylabel("wall-clock seconds")
    ax.set_title("runtime scaling")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)
    return fig


def render_tradeoff(rows: Sequence[ResultRow], out_path):
    """Approximation error against partition count and against runtime."""
    grouped = _rows_by_method(rows, require_sse=True)
    fig, (left, right) = plt.subplots(1, 2, figsize=(10.0, 4.5))
    for method in sorted(grouped):
        by_partitions = sorted(grouped[method], key=lambda r: (r.n_partitions, r.record))
        left.plot(
            [row.n_partitions for row in by_partitions],
            [row.sse for row in by_partitions],
            marker="o",
            label=method,
            color=_color(method),
        )
        by_runtime = sorted(grouped[method], key=lambda r: (r.total_seconds, r.record))
        right.plot(
            [row.total_seconds for row in by_runtime],
            [row.sse for row in by_runtime],
            marker="o",
            label=method,
            color=_color(method),
        )
    left.set_xlabel("partitions")
    left.set_ylabel("aligned SSE vs exact")
    left.set_title("error vs partitions")
    right.set_xlabel("wall-clock seconds")
    right.set_ylabel("aligned SSE vs exact")
    right.set_title("error vs runtime")
    right.legend()
    fig.tight_layout()
    _save(fig, out_path)
    return fig
