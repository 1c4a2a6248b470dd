"""Homogeneity analysis of cluster ensembles in the orbit space of partitions."""

__version__ = "0.1.0"

from .asymmetry import AsymmetryProfile, alpha_bounds, alpha_general, alpha_hard, in_asymmetry_ball
from .clustering import (
    Dataset,
    GeneratorConfig,
    KMeansConfig,
    LloydKMeans,
    ensemble,
    generate,
    kmeans,
    load_csv,
)
from .estimators import AlphaHomogeneity, HomogeneityModelSelector, KMeansEnsemble, MeanPartition
from .frechet import (
    GuardExceeded,
    MeanResult,
    MeanSet,
    exact_hard_mean,
    exact_mean_set,
    frechet_value,
    instability,
    mean_gap_bound,
    mean_partition,
    medoid,
)
from .homogeneity import (
    HomogeneityReport,
    StabilityProfile,
    alpha_homogeneity,
    exact_homogeneity,
    select_clusters,
)
from .partitions import (
    DimensionError,
    Partition,
    PartitionError,
    PermutationMap,
    apply_permutation,
    delta,
    frobenius_distance,
    from_labels,
    optimal_alignment,
)
from .sample import EnsembleSample, check_partition, check_sample, pairwise_delta_squared
