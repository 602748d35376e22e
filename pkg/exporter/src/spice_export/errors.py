"""Typed failures for the export pipeline.

ExportConfigError means the request itself is wrong (unknown dataset,
bad split) and maps to CLI exit 2; the others are runtime failures and
map to exit 3.
"""


class ExportError(Exception):
    """Base class for exporter failures."""


class ExportConfigError(ExportError):
    """The export request is malformed (unknown dataset, bad option)."""


class CheckpointError(ExportError):
    """Checkpoint missing, unreadable, or incompatible with the backbone."""


class DatasetError(ExportError):
    """Dataset acquisition failed after retrying."""
