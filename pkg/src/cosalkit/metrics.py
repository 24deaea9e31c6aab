"""Saliency evaluation measures: MAE, max F-measure, max E-measure, S-measure.

All four operate on a soft prediction map in [0, 1] against a binary
ground truth.  The threshold sweeps binarize the prediction with a
strict `>` at each of the 256 thresholds k/255, consistently across
measures.  Computations are arranged so the perfect prediction hits the
measures' fixed points exactly in floating point (MAE 0, the others 1),
not merely within rounding noise: quotients whose numerator and
denominator are bitwise equal, and block weights kept in integer
arithmetic until a single final division.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimMismatchError

N_THRESHOLDS = 256


@dataclass(frozen=True)
class MetricConfig:
    """The measure constants, exposed rather than hard-coded.

    beta2: beta-squared of the F-measure (1.0 gives the F1 variant).
    alpha: object/region mix of the S-measure.
    smeasure_lambda: dispersion weight in the S-measure object score
        2*mean / (mean^2 + 1 + 2*lambda*std).
    emeasure_eps: optional guard added to the alignment denominator;
        0 keeps the perfect-prediction value at exactly 1.
    n_thresholds: sweep resolution for the F- and E-measure maxima.
    """

    beta2: float = 0.3
    alpha: float = 0.5
    smeasure_lambda: float = 1.0
    emeasure_eps: float = 0.0
    n_thresholds: int = N_THRESHOLDS

    def __post_init__(self):
        if self.beta2 <= 0.0:
            raise ValueError("beta2 must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.smeasure_lambda < 0.0:
            raise ValueError("smeasure_lambda must be non-negative")
        if self.emeasure_eps < 0.0:
            raise ValueError("emeasure_eps must be non-negative")
        if self.n_thresholds < 2:
            raise ValueError("n_thresholds must be at least 2")


@dataclass(frozen=True)
class MetricReport:
    """Scalar measures plus the per-threshold precision/recall curves."""

    mae: float
    fbeta_max: float
    emeasure_max: float
    smeasure: float
    precision: tuple[float, ...]
    recall: tuple[float, ...]


def threshold_sweep(n: int = N_THRESHOLDS) -> np.ndarray:
    """The n uniform binarization thresholds k/(n-1), k = 0..n-1."""
    return np.arange(n, dtype=np.float64) / (n - 1)


def _as_pred(pred) -> np.ndarray:
    p = np.asarray(pred, dtype=np.float64)
    if p.ndim != 2:
        raise DimMismatchError(f"prediction must be 2-D, got shape {p.shape}")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("prediction values must lie in [0, 1]")
    return p


def _as_gt(gt) -> np.ndarray:
    g = np.asarray(gt)
    if g.ndim != 2:
        raise DimMismatchError(f"ground truth must be 2-D, got shape {g.shape}")
    if g.dtype != np.bool_:
        vals = np.unique(g)
        if not np.isin(vals, (0, 1)).all():
            raise ValueError("ground truth must be binary")
        g = g.astype(np.bool_)
    return g


def _check_pair(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p = _as_pred(pred)
    g = _as_gt(gt)
    if p.shape != g.shape:
        raise DimMismatchError(f"shapes differ: {p.shape} vs {g.shape}")
    return p, g


def mae(pred, gt) -> float:
    """Mean absolute error between the prediction and the 0/1 ground truth."""
    p, g = _check_pair(pred, gt)
    return float(np.abs(p - g.astype(np.float64)).mean())


def _sweep_counts(p: np.ndarray, g: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, int, int]:
    """True/false positive counts at every threshold of the sweep.

    Returns (tp, fp, n_pos, n_neg) with tp/fp as int64 arrays of length
    n; binarization is pred > T, counted exactly via sorted search.
    """
    ts = threshold_sweep(n)
    pos = np.sort(p[g], kind="stable")
    neg = np.sort(p[~g], kind="stable")
    tp = pos.size - np.searchsorted(pos, ts, side="right")
    fp = neg.size - np.searchsorted(neg, ts, side="right")
    return tp, fp, pos.size, neg.size


def pr_curves(pred, gt, n_thresholds: int = N_THRESHOLDS) -> tuple[np.ndarray, np.ndarray]:
    """Per-threshold precision and recall; 0 where the denominator is 0."""
    p, g = _check_pair(pred, gt)
    tp, fp, n_pos, n_neg = _sweep_counts(p, g, n_thresholds)
    tpf = tp.astype(np.float64)
    pred_pos = (tp + fp).astype(np.float64)
    precision = np.divide(tpf, pred_pos, out=np.zeros_like(tpf), where=pred_pos > 0)
    if n_pos > 0:
        recall = tpf / n_pos
    else:
        recall = np.zeros_like(tpf)
    return precision, recall


def fbeta_max(pred, gt, beta2: float = 0.3, n_thresholds: int = N_THRESHOLDS) -> float:
    """Best F-measure over the threshold sweep.

    Per threshold F = (1+beta2)*P*R / (beta2*P + R), defined as 0 when
    there are no true positives.  An empty ground truth scores 1 if some
    threshold binarizes the prediction to empty, else 0.
    """
    p, g = _check_pair(pred, gt)
    tp, fp, n_pos, _ = _sweep_counts(p, g, n_thresholds)
    if n_pos == 0:
        return 1.0 if (tp + fp == 0).any() else 0.0
    tpf = tp.astype(np.float64)
    pred_pos = (tp + fp).astype(np.float64)
    hit = tp > 0
    precision = np.divide(tpf, pred_pos, out=np.zeros_like(tpf), where=hit)
    recall = tpf / n_pos
    num = (1.0 + beta2) * precision * recall
    den = beta2 * precision + recall
    f = np.divide(num, den, out=np.zeros_like(num), where=hit)
    return float(f.max())


def emeasure_max(
    pred, gt, eps: float = 0.0, n_thresholds: int = N_THRESHOLDS
) -> float:
    """Best enhanced-alignment measure over the threshold sweep.

    Per threshold the binarized prediction S and ground truth G are
    mean-centered, phi = 2*xi_G*xi_S / (xi_G^2 + xi_S^2 + eps), and the
    score is the mean of (1+phi)^2/4.  An empty G scores 1 - mean(S), a
    full G scores mean(S).  Both arrays being binary, the per-pixel terms
    collapse onto the four (G, S) combinations, counted via the sweep.
    """
    p, g = _check_pair(pred, gt)
    n = p.size
    tp, fp, n_pos, n_neg = _sweep_counts(p, g, n_thresholds)
    mean_s = (tp + fp).astype(np.float64) / n
    if n_pos == 0:
        scores = 1.0 - mean_s
        return float(scores.max())
    if n_neg == 0:
        return float(mean_s.max())

    mean_g = n_pos / n
    xi_g_fg = 1.0 - mean_g
    xi_g_bg = -mean_g
    xi_s_on = 1.0 - mean_s
    xi_s_off = -mean_s

    def enhanced(a, b):
        phi = 2.0 * (a * b) / (a * a + b * b + eps)
        return (1.0 + phi) ** 2 / 4.0

    total = (
        tp * enhanced(xi_g_fg, xi_s_on)
        + (n_pos - tp) * enhanced(xi_g_fg, xi_s_off)
        + fp * enhanced(xi_g_bg, xi_s_on)
        + (n_neg - fp) * enhanced(xi_g_bg, xi_s_off)
    )
    return float((total / n).max())


def _round_half_even(numer: int, denom: int) -> int:
    """Round the exact rational numer/denom to the nearest integer,
    halves to even, with no floating point on the way."""
    return round(Fraction(numer, denom))


def _gt_centroid(g: np.ndarray) -> tuple[int, int]:
    """1-based centroid of the foreground, each coordinate rounded
    half-to-even; used as the block split for the region score."""
    rows, cols = np.nonzero(g)
    n = rows.size
    cy = _round_half_even(int(rows.sum()) + n, n)
    cx = _round_half_even(int(cols.sum()) + n, n)
    return cy, cx


def _block_ssim(a: np.ndarray, b: np.ndarray) -> float:
    """SSIM-style similarity of two blocks (luminance/contrast/structure
    product, single window).  Degenerate flat-and-empty statistics give 1
    when both moments vanish."""
    if a.min() == a.max() and b.min() == b.max():
        # Two flat blocks have zero variance and covariance by definition;
        # testing values (not float moments) keeps the branch exact.
        return 1.0
    n = a.size
    x = a.mean()
    y = b.mean()
    dx = a - x
    dy = b - y
    d = n - 1 if n > 1 else 1
    sig_x = (dx * dx).sum() / d
    sig_y = (dy * dy).sum() / d
    sig_xy = (dx * dy).sum() / d
    alpha = 4.0 * x * y * sig_xy
    beta = (x * x + y * y) * (sig_x + sig_y)
    if beta != 0.0:
        return float(alpha / beta)
    return 1.0 if alpha == 0.0 else 0.0


def _s_object_part(values: np.ndarray, lam: float) -> float:
    """Similarity of one side's prediction values to the ideal constant 1:
    2*mean / (mean^2 + 1 + 2*lambda*std)."""
    x = float(values.mean())
    sigma = float(values.std())
    return 2.0 * x / (x * x + 1.0 + 2.0 * lam * sigma)


def _s_object(p: np.ndarray, g: np.ndarray, lam: float) -> float:
    o_fg = _s_object_part(p[g], lam)
    o_bg = _s_object_part(1.0 - p[~g], lam)
    y = int(g.sum()) / g.size
    return o_bg + y * (o_fg - o_bg)


def _s_region(p: np.ndarray, g: np.ndarray) -> float:
    cy, cx = _gt_centroid(g)
    h, w = g.shape
    gf = g.astype(np.float64)
    total = 0.0
    for rs, cs in ((slice(0, cy), slice(0, cx)),
                   (slice(0, cy), slice(cx, w)),
                   (slice(cy, h), slice(0, cx)),
                   (slice(cy, h), slice(cx, w))):
        gb = gf[rs, cs]
        if gb.size == 0:
            continue
        total += gb.size * _block_ssim(p[rs, cs], gb)
    return total / (h * w)


def smeasure(pred, gt, alpha: float = 0.5, lam: float = 1.0) -> float:
    """Structure measure: region score blended toward the object score by
    alpha, clamped to [0, 1].

    The object score compares foreground and background prediction
    statistics against their ideals, weighted by the foreground ratio;
    the region score averages block SSIM over the four blocks split at
    the ground-truth centroid, weighted by block area.  An empty ground
    truth scores 1 - mean(pred); a full one scores mean(pred).
    """
    p, g = _check_pair(pred, gt)
    n_fg = int(g.sum())
    if n_fg == 0:
        return 1.0 - float(p.mean())
    if n_fg == g.size:
        return float(p.mean())
    obj = _s_object(p, g, lam)
    reg = _s_region(p, g)
    s = reg + alpha * (obj - reg)
    return min(max(s, 0.0), 1.0)


def evaluate_pair(pred, gt, cfg: MetricConfig = MetricConfig()) -> MetricReport:
    """All four measures plus the precision/recall curves for one pair."""
    precision, recall = pr_curves(pred, gt, cfg.n_thresholds)
    return MetricReport(
        mae=mae(pred, gt),
        fbeta_max=fbeta_max(pred, gt, cfg.beta2, cfg.n_thresholds),
        emeasure_max=emeasure_max(pred, gt, cfg.emeasure_eps, cfg.n_thresholds),
        smeasure=smeasure(pred, gt, cfg.alpha, cfg.smeasure_lambda),
        precision=tuple(float(v) for v in precision),
        recall=tuple(float(v) for v in recall),
    )


def aggregate(reports: list[MetricReport]) -> MetricReport:
    """Unweighted mean of every field across reports; curves pointwise."""
    if not reports:
        raise ValueError("cannot aggregate an empty report list")
    n = len(reports)
    curve_len = len(reports[0].precision)
    for r in reports:
        if len(r.precision) != curve_len or len(r.recall) != curve_len:
            raise DimMismatchError("reports have mismatched curve lengths")
    return MetricReport(
        mae=sum(r.mae for r in reports) / n,
        fbeta_max=sum(r.fbeta_max for r in reports) / n,
        emeasure_max=sum(r.emeasure_max for r in reports) / n,
        smeasure=sum(r.smeasure for r in reports) / n,
        precision=tuple(sum(r.precision[i] for r in reports) / n for i in range(curve_len)),
        recall=tuple(sum(r.recall[i] for r in reports) / n for i in range(curve_len)),
    )
