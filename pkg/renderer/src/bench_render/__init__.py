"""Figure rendering for benchmark output files.

Consumes the benchmark harness's documented file formats (result record
JSON, aggregate results.csv, embedding CSVs) and renders the three figure
families: error-colored embedding scatters, runtime-scaling curves, and
error/runtime trade-off curves. Performs no numerical recomputation:
every plotted value originates from the input files.
"""

__version__ = "0.1.0"

from .io import SchemaError, read_embedding_csv, read_record_json, read_results_csv
from .plots import render_scaling, render_scatter, render_tradeoff

__all__ = [
    "__version__",
    "SchemaError",
    "read_embedding_csv",
    "read_record_json",
    "read_results_csv",
    "render_scaling",
    "render_scatter",
    "render_tradeoff",
]
