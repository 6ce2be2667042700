"""Exception hierarchy shared by every stage of the pipeline."""


class HierCommError(Exception):
    """Base class for all errors raised by hiercomm."""


class EdgeListParseError(HierCommError, ValueError):
    """A line of an edge-list file could not be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyGraphError(HierCommError, ValueError):
    """No edges survive cleaning (self-loops and degree-0 nodes removed)."""


class DegenerateGraphError(HierCommError, ValueError):
    """The graph has no hubs, so no end-community exists."""


class ConvergenceError(HierCommError, RuntimeError):
    """Power iteration did not converge; ``last`` holds the final iterate."""

    def __init__(self, message, last=None, n_iter=None):
        super().__init__(message)
        self.last = last
        self.n_iter = n_iter


class InsufficientDataError(HierCommError, ValueError):
    """Not enough runs (or not enough spread in size) to fit a scaling law."""
