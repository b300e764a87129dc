"""Exception types shared across the package."""


class GroupGraphError(Exception):
    """Base class for all groupgraph errors."""


class GraphFormatError(GroupGraphError):
    """The document is not parseable as a clustered-graph file."""


class ValidationError(GroupGraphError):
    """A structural invariant of the data model is violated."""


class UnknownIdError(GroupGraphError):
    """A node, edge, group, session, or study id does not exist."""


class MissingGeometryError(GroupGraphError):
    """A geometric query was issued without a layout or raster."""


class UndefinedMetricError(GroupGraphError):
    """The requested metric is undefined for the target group."""


class GeometryError(GroupGraphError):
    """Raster or layout parameters are degenerate."""


class InapplicableTemplateError(GroupGraphError):
    """A task template cannot be instantiated on the given stimulus."""


class AnswerKindError(GroupGraphError):
    """An answer does not parse as the expected answer kind."""


class BundleError(GroupGraphError):
    """A study bundle is malformed or internally inconsistent."""


class ConflictError(GroupGraphError):
    """Duplicate study id, repeated submission, or out-of-order answer."""
