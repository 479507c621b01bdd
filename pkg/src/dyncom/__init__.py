"""Dynamic community detection in generalized link streams with
Longitudinal Modularity."""

from .community import DynamicCommunityStructure, MembershipSegment
from .elements import ActiveElement, ElementGraph, build_elements, induced_structure
from .errors import DyncomError, OracleSizeError, StreamError, StructureError
from .lago import OptimizerConfig, detect
from .oracle import enumerate_optimal
from .quality import (
    NullModel,
    QualityParams,
    lmodularity,
    move_gain,
    reduction_check,
    static_modularity,
    temporal_factor,
)
from .segmentation import segment
from .stream import Interaction, LinkStream, Modality, NodeTable, TimeDomain, TimeKind
from .timeset import TimeSet

__all__ = [
    "ActiveElement", "DynamicCommunityStructure", "DyncomError", "ElementGraph", "Interaction",
    "LinkStream", "MembershipSegment", "Modality", "NodeTable", "NullModel", "OptimizerConfig",
    "OracleSizeError", "QualityParams", "StreamError", "StructureError", "TimeDomain",
    "TimeKind", "TimeSet", "build_elements", "detect", "enumerate_optimal", "induced_structure",
    "lmodularity", "move_gain", "reduction_check", "segment", "static_modularity",
    "temporal_factor",
]

__version__ = "0.1.0"
