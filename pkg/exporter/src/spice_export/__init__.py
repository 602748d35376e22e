"""Bridge from image datasets to spice embedding files.

Runs a pretrained frozen vision backbone over a dataset and writes the
pooled penultimate-layer features in the spice binary interchange format,
plus a provenance manifest.
"""

from .backbone import extract_backbone_state, infer_arch, load_backbone
from .datasets import build_dataset, register_dataset, with_retry
from .errors import CheckpointError, DatasetError, ExportConfigError, ExportError
from .export import ExportJob, export, manifest_path, run_inference
from .writer import encode_embeddings, write_embeddings

__all__ = [
    "CheckpointError",
    "DatasetError",
    "ExportConfigError",
    "ExportError",
    "ExportJob",
    "build_dataset",
    "encode_embeddings",
    "export",
    "extract_backbone_state",
    "infer_arch",
    "load_backbone",
    "manifest_path",
    "register_dataset",
    "run_inference",
    "with_retry",
    "write_embeddings",
]
