"""Landscape analysis over a completed census."""

from .clusters import (
    ClusterGraph,
    ClusterMode,
    ClusterSet,
    Component,
    DisjointSet,
    export_cluster_graph,
    find_clusters,
    resolve_mode,
)
from .density import (
    DensityCurve,
    compressed_depth,
    density_curve,
    density_curves,
    distance_count_matrix,
    epistasis_sign,
    mean_curve,
    viable_counts_by_distance,
)
from .information import (
    InfoContent,
    compressed_baseline,
    cumulative_shells,
    functional_information,
    no_epistasis_baseline,
    shell_sizes,
)
from .neighbors import (
    hamming_neighbors,
    most_fragile,
    most_robust,
    robustness,
    robustness_all,
    robustness_distribution,
    viable_edges,
    viable_mask,
)
from .rotations import RotationClasses, rotation_classes

__all__ = [
    "ClusterGraph",
    "ClusterMode",
    "ClusterSet",
    "Component",
    "DensityCurve",
    "DisjointSet",
    "InfoContent",
    "RotationClasses",
    "compressed_baseline",
    "compressed_depth",
    "cumulative_shells",
    "density_curve",
    "density_curves",
    "distance_count_matrix",
    "epistasis_sign",
    "export_cluster_graph",
    "find_clusters",
    "functional_information",
    "hamming_neighbors",
    "mean_curve",
    "most_fragile",
    "most_robust",
    "no_epistasis_baseline",
    "resolve_mode",
    "robustness",
    "robustness_all",
    "robustness_distribution",
    "rotation_classes",
    "shell_sizes",
    "viable_counts_by_distance",
    "viable_edges",
    "viable_mask",
]
