"""Numeric kernels for the semi-supervised training objective.

Array-in/scalar-out functions: the soft-IoU term, masked-average
prototype pooling with its structural-consistency loss, the supervised
and confidence-weighted unsupervised batch losses, the teacher EMA
update, and the confidence-head regression target and error.  No
autograd and no framework types; callers differentiate elsewhere if
they need to.

Prediction maps are 2-D arrays with values in [0, 1]; feature maps are
(C, H, W); prototypes are length-C vectors; parameter vectors are flat
1-D arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatchError

IOU_EPS = 1e-6
SC_EPS = 1e-8


@dataclass(frozen=True)
class LossWeights:
    """Weights for the combined objective.

    lambda_sc: weight of the structural-consistency term inside the
        supervised loss.
    lambda_u: weight of the unsupervised term in the total loss.
    lambda_d: teacher EMA decay (fraction of the old teacher kept).
    eps: overflow guard inside the structural-consistency logs.
    """

    lambda_sc: float = 0.1
    lambda_u: float = 1.0
    lambda_d: float = 0.95
    eps: float = SC_EPS

    def __post_init__(self):
        if not 0.0 <= self.lambda_d <= 1.0:
            raise ValueError("lambda_d must be in [0, 1]")
        if not 0.0 < self.eps <= 1e-3:
            raise ValueError("eps must be in (0, 1e-3]")


@dataclass(frozen=True)
class ConfidenceBatch:
    """Raw per-sample confidence scores and their normalized weights."""

    raw: tuple[float, ...]
    weights: tuple[float, ...]


def _as_map(arr) -> np.ndarray:
    return np.asarray(arr, dtype=np.float64)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatchError(f"shapes differ: {a.shape} vs {b.shape}")


def iou_loss(pred, target, eps: float = IOU_EPS) -> float:
    """Soft IoU loss: 1 - (sum(p*t) + eps) / (sum(p) + sum(t) - sum(p*t) + eps).

    Both maps take values in [0, 1]; identical binary maps score 0 and
    disjoint ones approach 1.  The symmetric eps keeps two empty maps at
    loss 0.
    """
    p = _as_map(pred)
    t = _as_map(target)
    _check_same_shape(p, t)
    inter = float((p * t).sum())
    union = float(p.sum()) + float(t.sum()) - inter
    return 1.0 - (inter + eps) / (union + eps)


def masked_avg_prototype(feat, weight) -> np.ndarray:
    """Masked average pooling: per-channel sum(feat*weight)/sum(weight).

    feat is (C, H, W), weight is (H, W) in [0, 1] (or boolean).  An
    all-zero weight yields the zero vector.
    """
    f = _as_map(feat)
    w = _as_map(weight)
    if f.ndim != 3:
        raise DimMismatchError(f"feature map must be (C, H, W), got {f.shape}")
    _check_same_shape(f[0], w)
    total = float(w.sum())
    if total == 0.0:
        return np.zeros(f.shape[0], dtype=np.float64)
    return (f * w).sum(axis=(1, 2)) / total


def cosine_similarity(a, b) -> float:
    """Cosine of two vectors, defined as 0 when either is the zero vector."""
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    _check_same_shape(va, vb)
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(va @ vb) / (na * nb)


def sc_loss(proto, proto_c, proto_b, eps: float = SC_EPS) -> float:
    """Structural-consistency loss over three prototypes.

    Pulls the consistent prototype's cosine with the reference toward 1
    and the background prototype's toward 0:
    -log(cos(proto, proto_c) + eps) - log(1 - cos(proto, proto_b) + eps).
    """
    cos_c = cosine_similarity(proto, proto_c)
    cos_b = cosine_similarity(proto, proto_b)
    return -float(np.log(cos_c + eps)) - float(np.log(1.0 - cos_b + eps))


def supervised_loss(
    preds: Sequence,
    gts: Sequence,
    sc_terms: Sequence[float],
    lambda_sc: float = 0.1,
) -> float:
    """Mean soft-IoU over the labeled batch plus lambda_sc times the mean
    structural-consistency term."""
    if len(preds) != len(gts) or len(preds) != len(sc_terms):
        raise DimMismatchError(
            f"batch lengths differ: {len(preds)} preds, {len(gts)} targets, "
            f"{len(sc_terms)} sc terms"
        )
    if not len(preds):
        raise ValueError("supervised batch must be non-empty")
    iou_mean = sum(iou_loss(p, t) for p, t in zip(preds, gts)) / len(preds)
    sc_mean = sum(sc_terms) / len(sc_terms)
    return iou_mean + lambda_sc * sc_mean


def normalize_confidence(raw: Sequence[float]) -> ConfidenceBatch:
    """Scale raw confidence scores to weights summing to 1.

    An all-zero batch falls back to uniform weights so training can
    proceed; negative scores are rejected.
    """
    scores = [float(s) for s in raw]
    if not scores:
        raise ValueError("confidence batch must be non-empty")
    if any(s < 0.0 for s in scores):
        raise ValueError("confidence scores must be non-negative")
    total = sum(scores)
    if total == 0.0:
        weights = [1.0 / len(scores)] * len(scores)
    else:
        weights = [s / total for s in scores]
    return ConfidenceBatch(raw=tuple(scores), weights=tuple(weights))


def unsupervised_loss(
    student_preds: Sequence,
    teacher_preds: Sequence,
    conf: ConfidenceBatch,
) -> float:
    """Confidence-weighted mean of per-sample soft-IoU between the student
    and teacher predictions: (1/n) * sum_j w_j * iou_loss(s_j, t_j)."""
    if len(student_preds) != len(teacher_preds) or len(student_preds) != len(conf.weights):
        raise DimMismatchError(
            f"batch lengths differ: {len(student_preds)} student, "
            f"{len(teacher_preds)} teacher, {len(conf.weights)} weights"
        )
    n = len(student_preds)
    return (
        sum(w * iou_loss(s, t) for w, s, t in zip(conf.weights, student_preds, teacher_preds))
        / n
    )


def total_loss(sup: float, unsup: float, lambda_u: float = 1.0) -> float:
    """Combined objective: supervised + lambda_u * unsupervised."""
    return sup + lambda_u * unsup


def ema_update(teacher, student, lambda_d: float = 0.95) -> np.ndarray:
    """Blend student parameters into the teacher: lambda_d*teacher +
    (1-lambda_d)*student, elementwise on flat vectors.  Inputs are left
    unmodified."""
    t = np.asarray(teacher, dtype=np.float64)
    s = np.asarray(student, dtype=np.float64)
    _check_same_shape(t, s)
    return lambda_d * t + (1.0 - lambda_d) * s


def cen_target(pred, gt, beta2: float = 0.3) -> float:
    """Regression target for the confidence head: the max F-measure of the
    prediction against its pseudo label over the standard threshold sweep."""
    from .metrics import fbeta_max

    return fbeta_max(pred, gt, beta2=beta2)


def cen_mse(pred_scores: Sequence[float], target_scores: Sequence[float]) -> float:
    """Mean squared error between predicted confidences and their targets."""
    if len(pred_scores) != len(target_scores):
        raise DimMismatchError(
            f"batch lengths differ: {len(pred_scores)} predictions, "
            f"{len(target_scores)} targets"
        )
    if not len(pred_scores):
        raise ValueError("confidence batch must be non-empty")
    return sum((p - t) ** 2 for p, t in zip(pred_scores, target_scores)) / len(pred_scores)


def gate_unlabeled_pool(
    scores: Sequence[float], threshold: float = 0.9
) -> tuple[list[int], list[int]]:
    """Partition sample indices by confidence: scores at or above the
    threshold go to the labeled pool, the rest stay unlabeled."""
    high = [i for i, s in enumerate(scores) if s >= threshold]
    low = [i for i, s in enumerate(scores) if s < threshold]
    return high, low
