"""Exception hierarchy shared across the toolkit.

Two families matter for the CLI exit codes: SchemaError covers input
files and graph construction (exit 2), ComputeError covers everything
raised while analysing a valid graph or table (exit 3).
"""


class SpatialNetError(Exception):
    pass


class SchemaError(SpatialNetError):
    pass


class ComputeError(SpatialNetError):
    pass


class DisconnectedError(ComputeError):
    """Raised by operations that are undefined on graphs with more than
    one connected component."""
