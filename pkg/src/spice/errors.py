"""Typed exceptions shared across the pipeline."""


class SpiceError(Exception):
    """Base class for all pipeline errors."""


class InvalidInputError(SpiceError, ValueError):
    """Numeric input violates a precondition (non-finite, wrong range, ...)."""


class DegenerateInputError(SpiceError, ValueError):
    """Input is degenerate for the requested operation (e.g. zero-norm vector)."""


class ShapeError(SpiceError, ValueError):
    """Array shapes do not match the operation's contract."""


class InvalidLabelError(SpiceError, ValueError):
    """A cluster label lies outside [0, k)."""


class ConfigError(SpiceError, ValueError):
    """A configuration value violates its invariants."""


class ParseError(SpiceError, ValueError):
    """A file failed to parse; message names the byte offset or line."""

    def __init__(self, path, where, message):
        self.path = str(path)
        self.where = where
        super().__init__(f"{path}: {where}: {message}")


class ClusterStarvationError(SpiceError, RuntimeError):
    """Some cluster has no reliable samples; the semi-supervised stage is inapplicable."""

    def __init__(self, starved_clusters, message=None):
        self.starved_clusters = list(starved_clusters)
        super().__init__(
            message
            or f"clusters without reliable samples: {sorted(self.starved_clusters)}"
        )


class NumericFailureError(SpiceError, RuntimeError):
    """Training produced a non-finite loss or gradient."""
