"""Exporter error taxonomy.

``ExportError`` covers everything the exporter can reject about its
inputs; callers that only need coarse handling can catch it alone.
"""

from __future__ import annotations


class ExportError(Exception):
    """Base class for exporter failures."""


class BackendLoadError(ExportError):
    """A model backend could not be constructed (missing package,
    unreachable weights, incompatible runtime)."""


class NoImagesError(ExportError):
    """The image directory yielded nothing exportable."""
