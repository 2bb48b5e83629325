"""Pocsets and their cubulations, median calculus, group actions on cube
complexes, and Roller-boundary experiments for random walks."""

__version__ = "0.1.0"

from .config import ExperimentConfig
from .cubulation import MedianGraph, cubulate, enumerate_cubes, verify_median
from .pocset import Orientation, Pocset, Relation, relation

__all__ = [
    "ExperimentConfig",
    "MedianGraph",
    "Orientation",
    "Pocset",
    "Relation",
    "__version__",
    "cubulate",
    "enumerate_cubes",
    "relation",
    "verify_median",
]
