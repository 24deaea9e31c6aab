"""Offline exporter producing attention/cluster sidecars from images.

Runs a model backend (a deterministic builtin, or a pretrained
transformer via the torch hub) over an image directory and writes
``.attn.plane`` / ``.clus.plane`` files in the shared binary sidecar
format, resampled to a common resolution, with a checksummed manifest.
"""

from .backends import BuiltinBackend, DinoBackend, load_backend
from .errors import BackendLoadError, ExportError, NoImagesError
from .export import ExportJob, export_group

__version__ = "0.1.0"

__all__ = [
    "BackendLoadError",
    "BuiltinBackend",
    "DinoBackend",
    "ExportError",
    "ExportJob",
    "NoImagesError",
    "export_group",
    "load_backend",
]
