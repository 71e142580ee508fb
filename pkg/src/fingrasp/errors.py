"""Exception hierarchy for the grasp planning engine."""


class FingraspError(Exception):
    """Base class for all errors raised by this package."""


class MeshFormatError(FingraspError):
    """Malformed OBJ/PLY input.

    Carries enough location detail (line for ASCII, byte offset for binary)
    to point at the offending spot in the file.
    """

    def __init__(self, path, message, line=None, offset=None):
        loc = str(path)
        if line is not None:
            loc += f", line {line}"
        if offset is not None:
            loc += f", byte offset {offset}"
        super().__init__(f"{loc}: {message}")
        self.path = str(path)
        self.line = line
        self.offset = offset


class HandModelError(FingraspError):
    """Invalid hand description file; message names the offending field path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SolverError(FingraspError):
    """Numerical failure inside the pose or joint solvers."""
