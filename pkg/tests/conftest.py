"""Shared builders for synthetic datasets and raw sidecar bytes."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pytest

from cosalkit.dataset import write_mask_png
from cosalkit.planes import (
    AttentionStack,
    BinaryMask,
    ClusterMap,
    write_plane_file,
)

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_DIR = DATA_DIR / "fixture"
GOLDEN_DIR = DATA_DIR / "golden"


def pack_plane_bytes(
    dtype_code: int,
    planes: np.ndarray,
    magic: bytes = b"CSPL",
    version: int = 1,
    reserved: int = 0,
) -> bytes:
    """Hand-rolled sidecar bytes, independent of the library writer."""
    n, h, w = planes.shape
    header = struct.pack("<4sBBHIII", magic, version, dtype_code, reserved, n, h, w)
    fmt = "<f4" if dtype_code == 0 else "<i4"
    return header + np.ascontiguousarray(planes, dtype=fmt).tobytes()


def write_image_sidecars(
    group_dir: Path,
    image_id: str,
    attention: np.ndarray,
    clusters: np.ndarray,
    gt: np.ndarray | None = None,
) -> None:
    """Write one image's .attn.plane/.clus.plane (and optional GT PNG)."""
    group_dir.mkdir(parents=True, exist_ok=True)
    stack = AttentionStack(np.asarray(attention, dtype=np.float32))
    write_plane_file(stack, group_dir / f"{image_id}.attn.plane")
    cmap = ClusterMap(np.asarray(clusters, dtype=np.int32))
    write_plane_file(cmap, group_dir / f"{image_id}.clus.plane")
    if gt is not None:
        write_mask_png(BinaryMask(np.asarray(gt, dtype=bool)), group_dir / f"{image_id}.gt.png")


def blob_box(index: int, side: int = 32) -> tuple[slice, slice]:
    """Deterministic per-image blob rectangle, clear of the bottom band."""
    r0 = 4 + 2 * (index % 3)
    c0 = 3 + 5 * (index % 4)
    return slice(r0, r0 + 10), slice(c0, c0 + 9)


def build_rejection_dataset(
    root: Path,
    n_groups: int = 3,
    n_images: int = 4,
    side: int = 32,
    n_heads: int = 4,
    with_gt: bool = True,
) -> None:
    """Synthetic dataset where category 0 (a bottom band) appears in every
    image but never touches the attention foreground, while category 1
    (the blob) appears in every image and is the foreground.  Correct
    selection therefore picks category 1 everywhere."""
    for g in range(n_groups):
        group_dir = root / f"g{g:02d}"
        for i in range(n_images):
            rows, cols = blob_box(g * n_images + i, side)
            blob = np.zeros((side, side), dtype=bool)
            blob[rows, cols] = True

            attention = np.empty((n_heads, side, side), dtype=np.float32)
            for j in range(n_heads):
                lo = 0.2 + 0.05 * j
                hi = 0.7 + 0.05 * j
                attention[j] = np.where(blob, hi, lo)

            clusters = np.full((side, side), 2, dtype=np.int32)
            clusters[side - 6 :, :] = 0  # ever-present background band
            clusters[blob] = 1

            write_image_sidecars(
                group_dir,
                f"img{i}",
                attention,
                clusters,
                gt=blob if with_gt else None,
            )


@pytest.fixture
def rejection_root(tmp_path: Path) -> Path:
    root = tmp_path / "data"
    build_rejection_dataset(root)
    return root
