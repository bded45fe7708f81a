"""Balanced separators and clique minors for graphs excluding a fixed minor."""

from minorsep.config import DESK, PROVEN, ConstantsProfile, resolve_profile
from minorsep.graph_core import Graph, VertexSet, WeightFn, build_graph
from minorsep.models import MinorModel, SepResult
from minorsep.separator import (
    bounded_degree_pipeline,
    find_balanced_separator,
    find_separator_once,
)
from minorsep.verify import verify_minor_model, verify_separator

__version__ = "0.1.0"

__all__ = [
    "DESK",
    "PROVEN",
    "ConstantsProfile",
    "Graph",
    "MinorModel",
    "SepResult",
    "VertexSet",
    "WeightFn",
    "bounded_degree_pipeline",
    "build_graph",
    "find_balanced_separator",
    "find_separator_once",
    "resolve_profile",
    "verify_minor_model",
    "verify_separator",
]
