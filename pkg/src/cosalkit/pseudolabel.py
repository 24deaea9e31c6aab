"""Pseudo co-saliency mask selection from attention and cluster sidecars.

Per image the pipeline is: average the attention heads, min-max normalize,
Otsu-binarize into a foreground mask, then score the image's most frequent
cluster categories by how much of the image area they share with that
foreground.  The best-scoring category's cluster mask becomes the pseudo
label.  Scoring against the foreground is what keeps ever-present
background categories from winning on frequency alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import DimMismatchError
from .dataset import GroupBundle
from .planes import AttentionStack, BinaryMask, ClusterMap, FloatPlane

OverlapMode = Literal["image-area", "mask-area"]
FallbackPolicy = Literal["highest-frequency", "skip"]

N_BINS = 256


@dataclass(frozen=True)
class PseudoLabelConfig:
    """Knobs for pseudo-label selection.

    top_k: how many of the group's most frequent categories are scored
        per image.
    min_pixel_fraction: a category counts as present in an image only if
        it covers at least this fraction of the pixels (and at least one
        pixel); suppresses single-pixel cluster noise.
    overlap_mode: "image-area" divides the overlap by H*W, "mask-area"
        divides by the category mask area (the variant that trades away
        robustness on small objects).
    fallback: what to emit when every candidate scores zero.
    """

    top_k: int = 5
    min_pixel_fraction: float = 0.001
    overlap_mode: OverlapMode = "image-area"
    fallback: FallbackPolicy = "highest-frequency"

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0.0 <= self.min_pixel_fraction < 1.0:
            raise ValueError("min_pixel_fraction must be in [0, 1)")
        if self.overlap_mode not in ("image-area", "mask-area"):
            raise ValueError(f"unknown overlap_mode {self.overlap_mode!r}")
        if self.fallback not in ("highest-frequency", "skip"):
            raise ValueError(f"unknown fallback {self.fallback!r}")


@dataclass(frozen=True)
class OtsuSplit:
    """Result of the threshold search: chosen bin index plus degeneracy."""

    bin_index: int
    degenerate: bool


@dataclass(frozen=True)
class CandidateScore:
    category: int
    frequency: int
    score: float


@dataclass(frozen=True)
class ImageSelection:
    image_id: str
    selected_category: Optional[int]
    mask: BinaryMask
    candidates: tuple[CandidateScore, ...]
    fallback_used: bool
    otsu_degenerate: bool


@dataclass(frozen=True)
class PseudoLabelResult:
    group_name: str
    frequencies: dict[int, int]
    selections: tuple[ImageSelection, ...]


def average_attention(stack: AttentionStack) -> FloatPlane:
    """Head-average an attention stack and min-max normalize to [0, 1].

    A constant averaged map has no range to normalize over and comes back
    all-zero.
    """
    mean = stack.planes.astype(np.float64).sum(axis=0) / stack.n_heads
    lo = mean.min()
    hi = mean.max()
    if hi == lo:
        return FloatPlane(np.zeros_like(mean, dtype=np.float32))
    normalized = (mean - lo) / (hi - lo)
    return FloatPlane(normalized.astype(np.float32))


def quantize_saliency(sal: FloatPlane) -> np.ndarray:
    """Map saliency values in [0, 1] onto the 256 histogram bins."""
    data = sal.data.astype(np.float64)
    if data.min() < 0.0 or data.max() > 1.0:
        raise ValueError("saliency values must lie in [0, 1]")
    return np.minimum((data * N_BINS).astype(np.int64), N_BINS - 1)


def otsu_split(sal: FloatPlane) -> OtsuSplit:
    """Pick the histogram split maximizing between-class variance.

    The score for splitting after bin t is w0*w1*(mu0 - mu1)^2, compared
    exactly in integer arithmetic as (s0*w1 - s1*w0)^2 / (w0*w1) so that
    near-ties cannot flip on floating-point noise; ties go to the lowest
    bin index.  Splits with an empty class score zero.
    """
    bins = quantize_saliency(sal)
    hist = np.bincount(bins.ravel(), minlength=N_BINS)
    if np.count_nonzero(hist) <= 1:
        return OtsuSplit(0, degenerate=True)

    counts = [int(c) for c in hist]
    total_n = sum(counts)
    total_s = sum(b * c for b, c in enumerate(counts))

    best_t = 0
    best_num_sq = 0  # (s0*w1 - s1*w0)^2
    best_den = 1  # w0*w1
    w0 = 0
    s0 = 0
    for t in range(N_BINS):
        w0 += counts[t]
        s0 += t * counts[t]
        w1 = total_n - w0
        if w0 == 0 or w1 == 0:
            continue
        num = s0 * w1 - (total_s - s0) * w0
        num_sq = num * num
        den = w0 * w1
        # num_sq/den > best_num_sq/best_den, strictly, keeps the lowest t on ties.
        if num_sq * best_den > best_num_sq * den:
            best_t = t
            best_num_sq = num_sq
            best_den = den
    return OtsuSplit(best_t, degenerate=False)


def otsu_binarize(sal: FloatPlane) -> BinaryMask:
    """Binarize a saliency map at its Otsu split (bin index strictly above)."""
    split = otsu_split(sal)
    if split.degenerate:
        return BinaryMask(np.zeros(sal.data.shape, dtype=np.bool_))
    return BinaryMask(quantize_saliency(sal) > split.bin_index)


def present_categories(clusters: ClusterMap, min_pixel_fraction: float) -> dict[int, int]:
    """Categories present in one image, with their pixel counts.

    Presence requires at least one pixel and at least min_pixel_fraction
    of the image area.
    """
    counts = np.bincount(clusters.labels.ravel(), minlength=clusters.n_categories)
    floor = min_pixel_fraction * clusters.height * clusters.width
    return {
        int(c): int(n)
        for c, n in enumerate(counts)
        if n >= 1 and n >= floor
    }


def category_frequency(bundle: GroupBundle, min_pixel_fraction: float = 0.001) -> dict[int, int]:
    """Count, per category, the number of group images it is present in."""
    freq: dict[int, int] = {}
    for entry in bundle.entries:
        for c in present_categories(entry.clusters, min_pixel_fraction):
            freq[c] = freq.get(c, 0) + 1
    return dict(sorted(freq.items()))


def top_k_categories(image_categories, freq: dict[int, int], k: int) -> list[int]:
    """The image's categories ranked by (group frequency desc, id asc), cut to k."""
    ranked = sorted(image_categories, key=lambda c: (-freq[c], c))
    return ranked[:k]


def overlap_score(sm: BinaryMask, dm: BinaryMask, mode: OverlapMode = "image-area") -> float:
    """Overlap of a category mask with the attention foreground.

    image-area mode divides |sm & dm| by the image area; mask-area mode
    divides by |sm| (0 when sm is empty).
    """
    if sm.bits.shape != dm.bits.shape:
        raise DimMismatchError(
            f"mask shapes differ: {sm.bits.shape} vs {dm.bits.shape}"
        )
    inter = int(np.logical_and(sm.bits, dm.bits).sum())
    if mode == "image-area":
        return inter / sm.bits.size
    sm_area = sm.count()
    if sm_area == 0:
        return 0.0
    return inter / sm_area


def select_pseudo_masks(bundle: GroupBundle, cfg: PseudoLabelConfig) -> PseudoLabelResult:
    """Run the full per-group selection and return masks plus diagnostics.

    Per image, candidates are the top-k most frequent categories present
    in it; the winner maximizes the overlap score with ties broken by
    higher frequency then lower category id.  When every candidate scores
    zero the fallback policy decides between the most frequent candidate's
    mask and an empty mask; either way fallback_used is set.
    """
    freq = category_frequency(bundle, cfg.min_pixel_fraction)
    selections = []
    for entry in bundle.entries:
        sal = average_attention(entry.attention)
        split = otsu_split(sal)
        if split.degenerate:
            dm = BinaryMask(np.zeros(sal.data.shape, dtype=np.bool_))
        else:
            dm = BinaryMask(quantize_saliency(sal) > split.bin_index)

        cats = present_categories(entry.clusters, cfg.min_pixel_fraction)
        candidates = top_k_categories(cats, freq, cfg.top_k)

        scored = []
        for c in candidates:
            sm = BinaryMask(entry.clusters.labels == c)
            scored.append(CandidateScore(c, freq[c], overlap_score(sm, dm, cfg.overlap_mode)))

        winner: Optional[int] = None
        fallback_used = False
        # Candidates are in (freq desc, id asc) order, so keeping the first
        # strict maximum applies the tie-break for free.
        best_score = 0.0
        for cand in scored:
            if cand.score > best_score:
                best_score = cand.score
                winner = cand.category
        if winner is None:
            fallback_used = True
            if cfg.fallback == "highest-frequency" and candidates:
                winner = candidates[0]

        if winner is None:
            mask = BinaryMask(np.zeros(entry.clusters.labels.shape, dtype=np.bool_))
        else:
            mask = BinaryMask(entry.clusters.labels == winner)

        selections.append(
            ImageSelection(
                image_id=entry.image_id,
                selected_category=winner,
                mask=mask,
                candidates=tuple(scored),
                fallback_used=fallback_used,
                otsu_degenerate=split.degenerate,
            )
        )
    return PseudoLabelResult(bundle.group_name, freq, tuple(selections))
