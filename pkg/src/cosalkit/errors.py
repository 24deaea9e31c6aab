"""Exception hierarchy shared across the package.

Everything raised on malformed input data derives from ``DataError`` so the
CLI can map the whole family to a single "data error" exit code.
"""


class DataError(Exception):
    """Base class for all input-data problems."""


class PlaneFormatError(DataError):
    """Malformed plane sidecar file."""


class BadMagicError(PlaneFormatError):
    """File does not start with the plane-format magic bytes."""


class TruncatedPayloadError(PlaneFormatError):
    """File ends before the declared payload is complete."""


class DimOverflowError(PlaneFormatError):
    """Declared dimensions are zero or exceed the supported size cap."""


class NonFiniteError(DataError):
    """Float plane contains NaN or infinity."""


class MaskError(DataError):
    """Malformed mask image."""


class WrongColorTypeError(MaskError):
    """Mask PNG is not 8-bit grayscale."""


class DatasetLayoutError(DataError):
    """Dataset directory does not follow the expected layout."""


class MissingSidecarError(DatasetLayoutError):
    """An image is missing one of its sidecar files."""


class DimMismatchError(DataError):
    """Two planes or masks that must share dimensions do not."""


class NoGroupsError(DatasetLayoutError):
    """Dataset root contains no group directories."""
