class DyncomError(Exception):
    """Base class for all errors raised by dyncom."""


class StreamError(DyncomError, ValueError):
    """Invalid link stream data or an unsupported query on a stream."""


class StructureError(DyncomError, ValueError):
    """Invalid dynamic community structure."""


class OracleSizeError(DyncomError):
    """The exhaustive oracle was asked to enumerate too many elements."""

    def __init__(self, count: int, limit: int):
        super().__init__(
            f"oracle limited to {limit} active elements, instance has {count}"
        )
        self.count = count
        self.limit = limit
