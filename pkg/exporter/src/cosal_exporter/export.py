"""Export attention/cluster sidecars for a directory of images.

For every decodable image the exporter runs the chosen backend, resamples
the results to one common resolution — bilinear for attention planes,
nearest-neighbor for cluster labels so label identity survives — and
writes ``<stem>.attn.plane`` / ``<stem>.clus.plane`` files in the binary
sidecar format, plus a ``manifest.json`` recording sizes, category
counts, and SHA-256 checksums of every emitted file.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from cosalkit import AttentionStack, ClusterMap, write_plane_file

from .backends import DEFAULT_CLUSTERS, DEFAULT_HEADS, load_backend
from .errors import NoImagesError

logger = logging.getLogger("cosal_exporter")

MIN_TARGET_DIM = 16
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")
MANIFEST_FILENAME = "manifest.json"
ATTN_SUFFIX = ".attn.plane"
CLUS_SUFFIX = ".clus.plane"


@dataclass(frozen=True)
class ExportJob:
    """One export request: where to read, where to write, and how."""

    images_dir: Path
    out_dir: Path
    height: int
    width: int
    model: str = "builtin"
    n_heads: int = DEFAULT_HEADS
    n_clusters: int = DEFAULT_CLUSTERS
    device: str = "cpu"

    def __post_init__(self):
        object.__setattr__(self, "images_dir", Path(self.images_dir))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if self.height < MIN_TARGET_DIM or self.width < MIN_TARGET_DIM:
            raise ValueError(
                f"target size must be at least {MIN_TARGET_DIM}x{MIN_TARGET_DIM}, "
                f"got {self.height}x{self.width}"
            )


def _decode_image(path: Path) -> np.ndarray:
    """Load an image as (H, W, 3) float64 in [0, 1]."""
    with Image.open(path) as img:
        rgb = img.convert("RGB")
        return np.asarray(rgb, dtype=np.float64) / 255.0


def _resample_attention(planes: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear per-plane resampling; stays inside the input value range."""
    out = np.empty((planes.shape[0], height, width), dtype=np.float32)
    for i, plane in enumerate(planes):
        img = Image.fromarray(np.asarray(plane, dtype=np.float32), mode="F")
        resized = img.resize((width, height), resample=Image.BILINEAR)
        out[i] = np.asarray(resized, dtype=np.float32)
    return out


def _resample_clusters(labels: np.ndarray, height: int, width: int) -> np.ndarray:
    """Nearest-neighbor resampling; never invents labels."""
    img = Image.fromarray(np.asarray(labels, dtype=np.int32), mode="I")
    resized = img.resize((width, height), resample=Image.NEAREST)
    return np.asarray(resized, dtype=np.int32)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def export_group(job: ExportJob, backend=None) -> dict:
    """Run the backend over every image in the job and write sidecars.

    Returns the manifest dict (also written to ``manifest.json``).
    Undecodable images are skipped and logged; a run that exports
    nothing raises :class:`~cosal_exporter.errors.NoImagesError`.
    """
    if backend is None:
        backend = load_backend(
            job.model,
            n_heads=job.n_heads,
            n_clusters=job.n_clusters,
            device=job.device,
        )

    if not job.images_dir.is_dir():
        raise NoImagesError(f"{job.images_dir}: not a directory")
    paths = sorted(
        p for p in job.images_dir.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not paths:
        raise NoImagesError(f"{job.images_dir}: no image files found")

    job.out_dir.mkdir(parents=True, exist_ok=True)
    images: dict[str, dict] = {}
    skipped: list[str] = []
    for path in paths:
        try:
            rgb = _decode_image(path)
        except (UnidentifiedImageError, OSError) as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            skipped.append(path.name)
            continue

        attn = _resample_attention(backend.attention(rgb), job.height, job.width)
        labels, n_categories = backend.clusters(rgb)
        labels = _resample_clusters(labels, job.height, job.width)

        attn_path = job.out_dir / f"{path.stem}{ATTN_SUFFIX}"
        clus_path = job.out_dir / f"{path.stem}{CLUS_SUFFIX}"
        write_plane_file(AttentionStack.from_array(attn), attn_path)
        write_plane_file(ClusterMap.from_array(labels, n_categories), clus_path)

        images[path.stem] = {
            "attn": attn_path.name,
            "clus": clus_path.name,
            "n_heads": int(attn.shape[0]),
            "n_categories": int(n_categories),
            "sha256_attn": _sha256(attn_path),
            "sha256_clus": _sha256(clus_path),
        }

    if not images:
        raise NoImagesError(f"{job.images_dir}: no image could be decoded")

    manifest = {
        "backend": backend.name,
        "target_size": [job.height, job.width],
        "n_heads": int(next(iter(images.values()))["n_heads"]),
        "images": images,
        "skipped": skipped,
    }
    manifest_path = job.out_dir / MANIFEST_FILENAME
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
