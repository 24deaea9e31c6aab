"""Mask PNG I/O and dataset-directory loading.

Expected layout under a dataset root::

    <root>/<group>/<image_id>.attn.plane   float32 attention sidecar
    <root>/<group>/<image_id>.clus.plane   int32 cluster sidecar
    <root>/<group>/<image_id>.gt.png       optional ground-truth mask
    <root>/<group>/<image_id>.png          optional source image (unused here)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DatasetLayoutError,
    DimMismatchError,
    MaskError,
    MissingSidecarError,
    NoGroupsError,
    WrongColorTypeError,
)
from .planes import AttentionStack, BinaryMask, ClusterMap, FloatPlane, read_plane_file

ATTN_SUFFIX = ".attn.plane"
CLUS_SUFFIX = ".clus.plane"
GT_SUFFIX = ".gt.png"

# Grayscale value at or above which a mask pixel counts as foreground.
MASK_THRESHOLD = 128


def read_mask_png(path) -> BinaryMask:
    """Read an 8-bit grayscale PNG as a binary mask (pixel >= 128 is true)."""
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise WrongColorTypeError(f"{path}: mode {img.mode!r}, expected 8-bit grayscale")
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise MaskError(f"{path}: not a decodable image") from exc
    return BinaryMask(arr >= MASK_THRESHOLD)


def write_mask_png(mask: BinaryMask, path) -> None:
    """Write a binary mask as an 8-bit grayscale PNG with values 0/255.

    compress_level=0 keeps the emitted bytes independent of the zlib build,
    so identical masks always produce identical files.
    """
    arr = np.where(mask.bits, np.uint8(255), np.uint8(0))
    img = Image.fromarray(arr, mode="L")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    img.save(path, format="PNG", compress_level=0)


def read_soft_png(path) -> np.ndarray:
    """Read an 8-bit grayscale PNG as a float64 map in [0, 1] (value / 255)."""
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise WrongColorTypeError(f"{path}: mode {img.mode!r}, expected 8-bit grayscale")
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise MaskError(f"{path}: not a decodable image") from exc
    return arr.astype(np.float64) / 255.0


@dataclass(frozen=True)
class GroupEntry:
    """One image of a group: sidecar data plus the optional GT mask."""

    image_id: str
    attention: AttentionStack
    clusters: ClusterMap
    gt: Optional[BinaryMask] = None


@dataclass(frozen=True)
class GroupBundle:
    """An image group with all sidecar data loaded and cross-checked."""

    group_name: str
    entries: tuple[GroupEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise DatasetLayoutError(f"group {self.group_name!r} has no entries")

    def __len__(self) -> int:
        return len(self.entries)


def _as_stack(obj, path) -> AttentionStack:
    if isinstance(obj, FloatPlane):
        return AttentionStack(obj.data[np.newaxis].copy())
    if isinstance(obj, AttentionStack):
        return obj
    raise DatasetLayoutError(f"{path}: expected a float32 sidecar")


def load_group(group_dir) -> GroupBundle:
    """Load every image of one group directory into a GroupBundle.

    Raises MissingSidecarError when an image has only one of its two
    sidecars and DimMismatchError when attention, cluster, or GT
    dimensions disagree for an image.
    """
    group_dir = Path(group_dir)
    if not group_dir.is_dir():
        raise DatasetLayoutError(f"{group_dir} is not a directory")

    attn_ids = {p.name[: -len(ATTN_SUFFIX)] for p in group_dir.glob(f"*{ATTN_SUFFIX}")}
    clus_ids = {p.name[: -len(CLUS_SUFFIX)] for p in group_dir.glob(f"*{CLUS_SUFFIX}")}
    for image_id in sorted(attn_ids - clus_ids):
        raise MissingSidecarError(f"{group_dir / image_id}: missing {CLUS_SUFFIX} sidecar")
    for image_id in sorted(clus_ids - attn_ids):
        raise MissingSidecarError(f"{group_dir / image_id}: missing {ATTN_SUFFIX} sidecar")
    if not attn_ids:
        raise DatasetLayoutError(f"{group_dir}: no images with sidecars")

    entries = []
    for image_id in sorted(attn_ids):
        attention = _as_stack(
            read_plane_file(group_dir / f"{image_id}{ATTN_SUFFIX}"),
            group_dir / f"{image_id}{ATTN_SUFFIX}",
        )
        clusters = read_plane_file(group_dir / f"{image_id}{CLUS_SUFFIX}")
        if not isinstance(clusters, ClusterMap):
            raise DatasetLayoutError(
                f"{group_dir / image_id}{CLUS_SUFFIX}: expected an int32 sidecar"
            )
        if (attention.height, attention.width) != (clusters.height, clusters.width):
            raise DimMismatchError(
                f"{group_dir / image_id}: attention {attention.height}x{attention.width} "
                f"vs clusters {clusters.height}x{clusters.width}"
            )
        gt = None
        gt_path = group_dir / f"{image_id}{GT_SUFFIX}"
        if gt_path.exists():
            gt = read_mask_png(gt_path)
            if (gt.height, gt.width) != (attention.height, attention.width):
                raise DimMismatchError(
                    f"{gt_path}: GT {gt.height}x{gt.width} does not match sidecars"
                )
        entries.append(GroupEntry(image_id, attention, clusters, gt))
    return GroupBundle(group_dir.name, tuple(entries))


def discover_groups(root) -> list[Path]:
    """List group directories under a dataset root, sorted by name."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetLayoutError(f"{root} is not a directory")
    groups = sorted(p for p in root.iterdir() if p.is_dir())
    if not groups:
        raise NoGroupsError(f"{root}: no group directories found")
    return groups
