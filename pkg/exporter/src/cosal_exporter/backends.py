"""Model backends producing per-image attention heads and cluster labels.

Two backends are available:

``builtin``
    A dependency-free, fully deterministic stand-in built from classic
    image statistics: six saliency-flavored attention heads (luminance,
    gradients, center prior, saturation, local contrast) and a small
    k-means over smoothed RGB for cluster labels.  It exists so the
    exporter — and everything downstream — runs offline and
    byte-reproducibly.

``dino``
    Loads a pretrained vision transformer through the torch hub and
    extracts its final self-attention heads; cluster labels come from
    k-means over the patch embeddings.  Requires torch plus downloaded
    weights; any failure to construct it raises
    :class:`~cosal_exporter.errors.BackendLoadError`.

Both expose the same two methods: ``attention(rgb) -> (n_heads, H, W)``
float32 and ``clusters(rgb) -> (labels int32 (H, W), n_categories)``,
operating at the image's native resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BackendLoadError

MAX_BUILTIN_HEADS = 6
DEFAULT_HEADS = 6
DEFAULT_CLUSTERS = 4
_KMEANS_ITERS = 8
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def _normalize01(plane: np.ndarray) -> np.ndarray:
    lo = float(plane.min())
    hi = float(plane.max())
    if hi == lo:
        return np.zeros_like(plane)
    return (plane - lo) / (hi - lo)


def _box3(channel: np.ndarray) -> np.ndarray:
    """3x3 box mean with edge replication."""
    padded = np.pad(channel, 1, mode="edge")
    out = np.zeros_like(channel)
    for dy in range(3):
        for dx in range(3):
            out += padded[dy : dy + channel.shape[0], dx : dx + channel.shape[1]]
    return out / 9.0


@dataclass(frozen=True)
class BuiltinBackend:
    """Deterministic image-statistics backend (no model weights)."""

    n_heads: int = DEFAULT_HEADS
    n_clusters: int = DEFAULT_CLUSTERS
    name: str = "builtin"

    def __post_init__(self):
        if not 1 <= self.n_heads <= MAX_BUILTIN_HEADS:
            raise ValueError(
                f"builtin backend supports 1..{MAX_BUILTIN_HEADS} heads, "
                f"got {self.n_heads}"
            )
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")

    def attention(self, rgb: np.ndarray) -> np.ndarray:
        lum = rgb @ _LUMA_WEIGHTS
        grad_x = np.zeros_like(lum)
        grad_x[:, 1:] = np.abs(np.diff(lum, axis=1))
        grad_y = np.zeros_like(lum)
        grad_y[1:, :] = np.abs(np.diff(lum, axis=0))

        h, w = lum.shape
        yy, xx = np.mgrid[0:h, 0:w]
        cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
        scale = max(cy, cx, 1.0)
        center = 1.0 - np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2) / (scale * np.sqrt(2.0))

        saturation = rgb.max(axis=2) - rgb.min(axis=2)
        contrast = np.abs(lum - _box3(lum))

        heads = (lum, grad_x, grad_y, center, saturation, contrast)
        stacked = [_normalize01(head) for head in heads[: self.n_heads]]
        return np.stack(stacked).astype(np.float32)

    def clusters(self, rgb: np.ndarray) -> tuple[np.ndarray, int]:
        smooth = np.stack([_box3(rgb[..., c]) for c in range(3)], axis=-1)
        pixels = smooth.reshape(-1, 3)

        # Duplicate-safe seeding: centers come from the distinct quantized
        # colors, spread along the luminance ordering.  A constant image
        # therefore collapses to a single cluster instead of producing
        # empty ones.
        palette = np.unique(np.round(pixels * 31.0), axis=0) / 31.0
        k = min(self.n_clusters, len(palette))
        order = np.argsort(palette @ _LUMA_WEIGHTS, kind="stable")
        seed_idx = np.round(np.linspace(0, len(palette) - 1, k)).astype(int)
        centers = palette[order[seed_idx]]

        labels = np.zeros(len(pixels), dtype=np.int64)
        for _ in range(_KMEANS_ITERS):
            dists = ((pixels[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = dists.argmin(axis=1)
            for j in range(k):
                members = pixels[labels == j]
                if len(members):
                    centers[j] = members.mean(axis=0)
        return labels.reshape(rgb.shape[:2]).astype(np.int32), k


def _default_hub_load() -> Callable:
    """Resolve the torch hub loader; split out so tests can stub it."""
    import torch  # deferred: heavyweight and optional

    return torch.hub.load


class DinoBackend:
    """Pretrained-transformer backend; construction may fail offline."""

    name = "dino"
    _HUB_REPO = "facebookresearch/dino:main"
    _HUB_MODEL = "dino_vits16"
    _PATCH = 16

    def __init__(self, model, device: str, n_clusters: int):
        self._model = model
        self._device = device
        self.n_clusters = n_clusters

    @classmethod
    def load(
        cls,
        device: str = "cpu",
        n_clusters: int = DEFAULT_CLUSTERS,
        hub_load: Optional[Callable] = None,
    ) -> "DinoBackend":
        try:
            if hub_load is None:
                hub_load = _default_hub_load()
            model = hub_load(cls._HUB_REPO, cls._HUB_MODEL)
            model.eval()
        except Exception as exc:
            raise BackendLoadError(
                f"cannot load pretrained backend {cls._HUB_MODEL}: {exc}"
            ) from exc
        return cls(model, device, n_clusters)

    def attention(self, rgb: np.ndarray) -> np.ndarray:
        import torch

        h, w = rgb.shape[:2]
        ph, pw = (max(h // self._PATCH, 1), max(w // self._PATCH, 1))
        tensor = (
            torch.from_numpy(rgb.astype(np.float32))
            .permute(2, 0, 1)[None]
            .to(self._device)
        )
        tensor = torch.nn.functional.interpolate(
            tensor, size=(ph * self._PATCH, pw * self._PATCH), mode="bilinear"
        )
        with torch.no_grad():
            attn = self._model.get_last_selfattention(tensor)
        # class-token attention over patches, one plane per head
        heads = attn[0, :, 0, 1:].reshape(-1, ph, pw)
        return heads.cpu().numpy().astype(np.float32)

    def clusters(self, rgb: np.ndarray) -> tuple[np.ndarray, int]:
        # Patch embeddings clustered with the same small k-means the
        # builtin backend uses, at patch resolution.
        planes = self.attention(rgb)
        flat = planes.reshape(planes.shape[0], -1).T
        pseudo_rgb = flat[:, :3].reshape(planes.shape[1], planes.shape[2], -1)
        backend = BuiltinBackend(n_heads=1, n_clusters=self.n_clusters)
        return backend.clusters(pseudo_rgb)


def load_backend(
    name: str,
    n_heads: int = DEFAULT_HEADS,
    n_clusters: int = DEFAULT_CLUSTERS,
    device: str = "cpu",
    hub_load: Optional[Callable] = None,
):
    """Construct a backend by name; unknown names are usage errors."""
    if name == "builtin":
        return BuiltinBackend(n_heads=n_heads, n_clusters=n_clusters)
    if name == "dino":
        return DinoBackend.load(device=device, n_clusters=n_clusters, hub_load=hub_load)
    raise ValueError(f"unknown backend {name!r}; choose builtin or dino")
