"""Clustered-graph query engine, group-level task catalog, and study harness."""

from .errors import (
    AnswerKindError,
    BundleError,
    ConflictError,
    GeometryError,
    GraphFormatError,
    GroupGraphError,
    InapplicableTemplateError,
    MissingGeometryError,
    UndefinedMetricError,
    UnknownIdError,
    ValidationError,
)
from .layout import (
    LayoutGeometry,
    RegionRaster,
    compute_layout,
    group_area,
    link_length,
    rasterize_regions,
    shared_boundary_length,
)
from .metagraph import Metagraph, build_contact_metagraph, build_link_metagraph
from .model import (
    ClusteredGraph,
    Edge,
    Group,
    Node,
    count_groups,
    generate_planted_partition,
    load_clustered_graph,
    serialize_clustered_graph,
)
from .queries import Metric, QueryContext
from .tasks import (
    TaskDescriptor,
    TaskInstance,
    TaskTemplate,
    describe,
    instantiate,
    list_templates,
    score,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerKindError",
    "BundleError",
    "ClusteredGraph",
    "ConflictError",
    "Edge",
    "GeometryError",
    "GraphFormatError",
    "Group",
    "GroupGraphError",
    "InapplicableTemplateError",
    "LayoutGeometry",
    "Metagraph",
    "Metric",
    "MissingGeometryError",
    "Node",
    "QueryContext",
    "RegionRaster",
    "TaskDescriptor",
    "TaskInstance",
    "TaskTemplate",
    "UndefinedMetricError",
    "UnknownIdError",
    "ValidationError",
    "build_contact_metagraph",
    "build_link_metagraph",
    "compute_layout",
    "count_groups",
    "describe",
    "generate_planted_partition",
    "group_area",
    "instantiate",
    "link_length",
    "list_templates",
    "load_clustered_graph",
    "rasterize_regions",
    "score",
    "serialize_clustered_graph",
    "shared_boundary_length",
    "__version__",
]
