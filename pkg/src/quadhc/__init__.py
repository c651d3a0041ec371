"""Comparison-based hierarchical clustering.

Clustering when only ordinal statements "pair (i,j) is more similar than
pair (k,l)" are available: planted-model generation, active and passive
comparison oracles, comparison-only single/complete linkage, kernel and
preference variants of average linkage, and the metrics and harness to
evaluate them.
"""

__version__ = "0.1.0"

from .backend import NUMBA_ENABLED, backend_name
from .dendrogram import Dendrogram, random_dendrogram
from .engine import (
    ContractViolation,
    IntegerAverageStrategy,
    LinkageStrategy,
    ScoreMatrixStrategy,
    agglomerate,
)
from .kernel import (
    ActiveKernelConfig,
    KernelMatrix,
    active_kernel,
    average_linkage_on_kernel,
    passive_kernel,
)
from .metrics import aari, ari, beta_expected, cosine_similarity_matrix, dasgupta_cost
from .oracle import (
    ActiveOracle,
    PairId,
    Quadruplet,
    QuadrupletSet,
    ingest_triplets,
    make_pair,
    sample_passive,
)
from .ordinal import PairRankTable, complete_linkage, rank_all_pairs, single_linkage
from .planted import (
    GroundTruthHierarchy,
    PlantedConfig,
    SimilarityMatrix,
    expected_similarity,
    generate_planted,
    ground_truth_dendrogram,
)
from .quadlink import (
    ClusterPreferenceTable,
    InitialPartitionConfig,
    MergeConsistencyError,
    cluster_similarity,
    four_al,
    preference,
)

__all__ = [
    "NUMBA_ENABLED",
    "backend_name",
    "Dendrogram",
    "random_dendrogram",
    "ContractViolation",
    "LinkageStrategy",
    "ScoreMatrixStrategy",
    "IntegerAverageStrategy",
    "agglomerate",
    "ActiveKernelConfig",
    "KernelMatrix",
    "active_kernel",
    "passive_kernel",
    "average_linkage_on_kernel",
    "ari",
    "aari",
    "dasgupta_cost",
    "cosine_similarity_matrix",
    "beta_expected",
    "ActiveOracle",
    "PairId",
    "Quadruplet",
    "QuadrupletSet",
    "make_pair",
    "sample_passive",
    "ingest_triplets",
    "PairRankTable",
    "rank_all_pairs",
    "single_linkage",
    "complete_linkage",
    "PlantedConfig",
    "SimilarityMatrix",
    "GroundTruthHierarchy",
    "generate_planted",
    "expected_similarity",
    "ground_truth_dendrogram",
    "InitialPartitionConfig",
    "ClusterPreferenceTable",
    "MergeConsistencyError",
    "preference",
    "cluster_similarity",
    "four_al",
]
