"""Compression-based fast diffusion maps.

Exact diffusion maps, the inverse-density two-step kernel, region-level
kernel compression with coherence-driven partitioning, embedding
interpolation, two landmark baselines, and a benchmark harness.
"""

__version__ = "0.1.0"

from .errors import (
    CfdmError,
    ConfigError,
    DataError,
    DatasetError,
    DegeneracyError,
    ParameterError,
    PartitionError,
    SamplingError,
    SolverError,
    SpectrumError,
    VerificationError,
)
from .kernels import (
    AffinityOperator,
    DataMatrix,
    KernelMatrix,
    build_gaussian_kernel,
    build_idmgc_kernel,
    degrees,
    markov_normalize,
    suggest_epsilon,
    symmetric_affinity,
)
from .eigen import EigenSystem, eigendecompose
from .compress import (
    CompressedOperators,
    Partition,
    build_compressed_operators,
    compress_kernel,
    compressed_degrees,
    compressed_markov,
    region_to_point,
)
from .partitioning import (
    CentroidScoreMatrix,
    CoherenceVector,
    LocalityDiagnostic,
    angular_scores,
    assign_partitions,
    diffusion_coherence,
    partition_locality_diagnostic,
    sample_centroids,
    verify_coherence_trace,
)
from .embedding import (
    AlignmentReport,
    Embedding,
    align_embeddings,
    compressed_diffusion_map,
    diffusion_map,
    interpolate_embedding,
)
from .baselines import BaselineConfig, centroid_interp_dm, cluster_landmarks, nystrom_dm
from .datasets import SwissRoll, generate_swiss_roll, load_dataset
from .pipeline import MethodRun, run_baseline, run_cfdm, run_exact, run_method
from .bench import (
    DatasetConfig,
    ExperimentConfig,
    MethodOutcome,
    ResultRecord,
    read_record,
    run_config,
    run_experiment,
    sweep,
    write_results,
)

__all__ = [
    "__version__",
    "CfdmError",
    "ConfigError",
    "DataError",
    "DatasetError",
    "DegeneracyError",
    "ParameterError",
    "PartitionError",
    "SamplingError",
    "SolverError",
    "SpectrumError",
    "VerificationError",
    "AffinityOperator",
    "DataMatrix",
    "KernelMatrix",
    "build_gaussian_kernel",
    "build_idmgc_kernel",
    "degrees",
    "markov_normalize",
    "suggest_epsilon",
    "symmetric_affinity",
    "EigenSystem",
    "eigendecompose",
    "CompressedOperators",
    "Partition",
    "build_compressed_operators",
    "compress_kernel",
    "compressed_degrees",
    "compressed_markov",
    "region_to_point",
    "CentroidScoreMatrix",
    "CoherenceVector",
    "LocalityDiagnostic",
    "angular_scores",
    "assign_partitions",
    "diffusion_coherence",
    "partition_locality_diagnostic",
    "sample_centroids",
    "verify_coherence_trace",
    "AlignmentReport",
    "Embedding",
    "align_embeddings",
    "compressed_diffusion_map",
    "diffusion_map",
    "interpolate_embedding",
    "BaselineConfig",
    "centroid_interp_dm",
    "cluster_landmarks",
    "nystrom_dm",
    "SwissRoll",
    "generate_swiss_roll",
    "load_dataset",
    "MethodRun",
    "run_baseline",
    "run_cfdm",
    "run_exact",
    "run_method",
    "DatasetConfig",
    "ExperimentConfig",
    "MethodOutcome",
    "ResultRecord",
    "read_record",
    "run_config",
    "run_experiment",
    "sweep",
    "write_results",
]
