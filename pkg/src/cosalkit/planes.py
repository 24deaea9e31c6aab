"""Core raster types and the binary plane sidecar format.

File layout (all integers little-endian)::

    offset  size  field
    0       4     magic  b"CSPL"
    4       1     version, currently 1
    5       1     dtype tag: 0 = float32, 1 = int32
    6       2     reserved, must be 0
    8       4     n_planes (u32)
    12      4     height   (u32)
    16      4     width    (u32)
    20      ...   n_planes * height * width values, row-major within a
                  plane, plane-major overall, little-endian

A float32 file with one plane reads back as a :class:`FloatPlane`, with
several planes as an :class:`AttentionStack`; an int32 file must have
exactly one plane and reads back as a :class:`ClusterMap`.  Round-trips
through :func:`write_plane_file` / :func:`read_plane_file` are bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    BadMagicError,
    DimOverflowError,
    NonFiniteError,
    PlaneFormatError,
    TruncatedPayloadError,
)

MAGIC = b"CSPL"
FORMAT_VERSION = 1
DTYPE_F32 = 0
DTYPE_I32 = 1

_HEADER = struct.Struct("<4sBBHIII")

# One plane payload is capped at 1 GiB worth of elements.
MAX_ELEMENTS = 1 << 28


@dataclass(frozen=True)
class FloatPlane:
    """A single H x W float32 raster."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.dtype != np.float32:
            raise ValueError("FloatPlane.data must be a 2-D float32 array")

    @classmethod
    def from_array(cls, arr) -> "FloatPlane":
        data = np.ascontiguousarray(arr, dtype=np.float32)
        if not np.isfinite(data).all():
            raise NonFiniteError("plane contains non-finite values")
        return cls(data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class AttentionStack:
    """Per-image stack of self-attention planes, one per head."""

    planes: np.ndarray  # (n_heads, H, W) float32

    def __post_init__(self):
        if self.planes.ndim != 3 or self.planes.dtype != np.float32:
            raise ValueError("AttentionStack.planes must be a 3-D float32 array")
        if self.planes.shape[0] < 1:
            raise ValueError("AttentionStack needs at least one head")

    @classmethod
    def from_array(cls, arr) -> "AttentionStack":
        planes = np.ascontiguousarray(arr, dtype=np.float32)
        if not np.isfinite(planes).all():
            raise NonFiniteError("attention stack contains non-finite values")
        return cls(planes)

    @property
    def n_heads(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]


@dataclass(frozen=True)
class ClusterMap:
    """Per-image plane of unsupervised category labels."""

    labels: np.ndarray  # (H, W) int32, non-negative
    n_categories: int = field(default=0)

    def __post_init__(self):
        if self.labels.ndim != 2 or self.labels.dtype != np.int32:
            raise ValueError("ClusterMap.labels must be a 2-D int32 array")
        if self.n_categories == 0:
            # Infer the declared category count from the data.
            inferred = int(self.labels.max()) + 1 if self.labels.size else 1
            object.__setattr__(self, "n_categories", inferred)

    @classmethod
    def from_array(cls, arr, n_categories: int = 0) -> "ClusterMap":
        labels = np.ascontiguousarray(arr, dtype=np.int32)
        if labels.size and labels.min() < 0:
            raise ValueError("cluster labels must be non-negative")
        cmap = cls(labels, n_categories)
        if labels.size and int(labels.max()) >= cmap.n_categories:
            raise ValueError("cluster label exceeds declared category count")
        return cmap

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class BinaryMask:
    """An H x W boolean plane."""

    bits: np.ndarray  # (H, W) bool

    def __post_init__(self):
        if self.bits.ndim != 2 or self.bits.dtype != np.bool_:
            raise ValueError("BinaryMask.bits must be a 2-D bool array")

    @classmethod
    def from_array(cls, arr) -> "BinaryMask":
        return cls(np.ascontiguousarray(arr, dtype=np.bool_))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


PlaneLike = Union[FloatPlane, AttentionStack, ClusterMap]


def _check_dims(n_planes: int, height: int, width: int) -> None:
    if n_planes < 1 or height < 1 or width < 1:
        raise DimOverflowError(
            f"dimensions out of range: n_planes={n_planes} height={height} width={width}"
        )
    if n_planes * height * width > MAX_ELEMENTS:
        raise DimOverflowError(
            f"payload of {n_planes}x{height}x{width} exceeds the element cap"
        )


def read_plane_file(path) -> PlaneLike:
    """Read one plane sidecar file.

    Returns a FloatPlane (f32, one plane), AttentionStack (f32, several
    planes) or ClusterMap (i32) depending on the header.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise TruncatedPayloadError(f"{path}: file shorter than the magic")
    if raw[:4] != MAGIC:
        raise BadMagicError(f"{path}: bad magic {raw[:4]!r}")
    if len(raw) < _HEADER.size:
        raise TruncatedPayloadError(f"{path}: incomplete header")
    _, version, dtype, reserved, n_planes, height, width = _HEADER.unpack_from(raw)
    if version != FORMAT_VERSION:
        raise PlaneFormatError(f"{path}: unsupported version {version}")
    if dtype not in (DTYPE_F32, DTYPE_I32):
        raise PlaneFormatError(f"{path}: unknown dtype tag {dtype}")
    if reserved != 0:
        raise PlaneFormatError(f"{path}: reserved field is {reserved}, expected 0")
    _check_dims(n_planes, height, width)

    expected = _HEADER.size + n_planes * height * width * 4
    if len(raw) < expected:
        raise TruncatedPayloadError(
            f"{path}: payload is {len(raw) - _HEADER.size} bytes, expected {expected - _HEADER.size}"
        )
    if len(raw) > expected:
        raise PlaneFormatError(f"{path}: {len(raw) - expected} trailing bytes")

    payload = raw[_HEADER.size:]
    if dtype == DTYPE_F32:
        values = np.frombuffer(payload, dtype="<f4").reshape(n_planes, height, width)
        if not np.isfinite(values).all():
            raise NonFiniteError(f"{path}: non-finite float value in payload")
        values = np.ascontiguousarray(values, dtype=np.float32)
        if n_planes == 1:
            return FloatPlane(values[0].copy())
        return AttentionStack(values)

    if n_planes != 1:
        raise PlaneFormatError(f"{path}: int32 files must hold exactly one plane")
    labels = np.frombuffer(payload, dtype="<i4").reshape(height, width)
    if labels.min() < 0:
        raise PlaneFormatError(f"{path}: negative cluster label")
    return ClusterMap(np.ascontiguousarray(labels, dtype=np.int32))


def write_plane_file(plane: PlaneLike, path) -> None:
    """Write a plane sidecar file; inverse of :func:`read_plane_file`."""
    if isinstance(plane, FloatPlane):
        dtype, values = DTYPE_F32, plane.data[np.newaxis]
    elif isinstance(plane, AttentionStack):
        dtype, values = DTYPE_F32, plane.planes
    elif isinstance(plane, ClusterMap):
        dtype, values = DTYPE_I32, plane.labels[np.newaxis]
    else:
        raise TypeError(f"cannot serialize {type(plane).__name__}")

    n_planes, height, width = values.shape
    _check_dims(n_planes, height, width)
    if dtype == DTYPE_F32:
        if not np.isfinite(values).all():
            raise NonFiniteError("refusing to write non-finite float plane")
        payload = np.ascontiguousarray(values, dtype="<f4").tobytes()
    else:
        if values.min() < 0:
            raise ValueError("refusing to write negative cluster labels")
        payload = np.ascontiguousarray(values, dtype="<i4").tobytes()

    header = _HEADER.pack(MAGIC, FORMAT_VERSION, dtype, 0, n_planes, height, width)
    Path(path).write_bytes(header + payload)
