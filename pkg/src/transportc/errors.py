"""Exception hierarchy.

Every failure that is a property of the input data (as opposed to a missing
file or malformed JSON) derives from :class:`TransportcError`; the command
line maps those to exit status 1.
"""


class TransportcError(Exception):
    """Base class for domain errors."""


class SchemaError(Exception):
    """Input document does not match its JSON schema (exit status 2)."""


# graph model
class GraphError(TransportcError):
    pass


class CycleDetected(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class ParallelEdge(GraphError):
    pass


class IncompleteOrdering(GraphError):
    pass


class UnknownVertex(GraphError):
    pass


# reduction / expressions
class NotReduced(TransportcError):
    pass


class MissingAssignment(TransportcError):
    pass


class InterfaceMismatch(TransportcError):
    pass


# composition
class NotGluable(TransportcError):
    pass


class SegmentOutOfRange(TransportcError):
    pass


# transport
class PathOutsideChart(TransportcError):
    pass


class SingularInterpolation(TransportcError):
    pass


class SingularGauge(TransportcError):
    pass


class WeightsNotAffine(TransportcError):
    pass


class ChartsNotAdjacent(TransportcError):
    pass


class LogBranchFailure(TransportcError):
    pass


# calculus / circuits
class ShrinkNotAllowed(TransportcError):
    pass


class BoundaryMismatch(TransportcError):
    pass


class ArityMismatch(TransportcError):
    pass
