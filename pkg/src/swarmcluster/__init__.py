"""Firefly-based spatial clustering with automatic cluster count and route-aware fitness."""

from swarmcluster.datamodel import (
    Dataset,
    DatasetError,
    Firefly,
    Partition,
    RngStream,
    assign,
    load_dataset,
    nearest_centroid,
)
from swarmcluster.fitness import (
    FitnessBreakdown,
    FitnessWeights,
    NormalizationBounds,
    default_bounds,
    evaluate,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetError",
    "Firefly",
    "FitnessBreakdown",
    "FitnessWeights",
    "NormalizationBounds",
    "Partition",
    "RngStream",
    "assign",
    "default_bounds",
    "evaluate",
    "load_dataset",
    "nearest_centroid",
]
