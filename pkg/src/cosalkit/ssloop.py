"""Seeded demo loop exercising the loss kernels and the teacher EMA.

No network is trained: each step draws synthetic labeled/unlabeled
batches and prototypes from a seeded generator, evaluates the
supervised, unsupervised, and total losses, applies the EMA update to a
synthetic parameter vector, and records everything.  The student vector
is held fixed, so the logged teacher-student gap contracts by exactly
the decay factor per step and the log doubles as numeric evidence for
the contraction and weight-normalization invariants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import (
    LossWeights,
    ema_update,
    masked_avg_prototype,
    normalize_confidence,
    sc_loss,
    supervised_loss,
    total_loss,
    unsupervised_loss,
)

BATCH_CAP = 16
MAP_SIDE = 8
FEATURE_CHANNELS = 6
PARAM_DIM = 32


@dataclass(frozen=True)
class SSLoopConfig:
    """Demo-loop shape: step count, per-branch batch sizes (capped), seed."""

    steps: int = 8
    labeled_batch: int = 4
    unlabeled_batch: int = 6
    seed: int = 0
    weights: LossWeights = LossWeights()

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.labeled_batch < 1 or self.unlabeled_batch < 1:
            raise ValueError("batch sizes must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    """One step's losses, normalized-weight sum, and teacher-student gap."""

    step: int
    supervised: float
    unsupervised: float
    total: float
    weight_sum: float
    gap: float


def _soft_maps(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    return [rng.random((MAP_SIDE, MAP_SIDE)) for _ in range(n)]


def _binary_maps(rng: np.random.Generator, n: int) -> list[np.ndarray]:
    return [rng.random((MAP_SIDE, MAP_SIDE)) < 0.5 for _ in range(n)]


def _sc_term(rng: np.random.Generator, eps: float) -> float:
    feat = rng.random((FEATURE_CHANNELS, MAP_SIDE, MAP_SIDE))
    fg = rng.random((MAP_SIDE, MAP_SIDE)) < 0.5
    proto = masked_avg_prototype(feat, fg)
    proto_c = masked_avg_prototype(feat + 0.1 * rng.random(feat.shape), fg)
    proto_b = masked_avg_prototype(feat, ~fg)
    return sc_loss(proto, proto_c, proto_b, eps)


def run_ssloop(cfg: SSLoopConfig = SSLoopConfig()) -> list[StepRecord]:
    """Run the demo loop and return one record per step."""
    rng = np.random.default_rng(cfg.seed)
    w = cfg.weights
    n_labeled = min(cfg.labeled_batch, BATCH_CAP)
    n_unlabeled = min(cfg.unlabeled_batch, BATCH_CAP)

    student = rng.standard_normal(PARAM_DIM)
    teacher = rng.standard_normal(PARAM_DIM)

    records = []
    for step in range(1, cfg.steps + 1):
        preds = _soft_maps(rng, n_labeled)
        gts = _binary_maps(rng, n_labeled)
        sc_terms = [_sc_term(rng, w.eps) for _ in range(n_labeled)]
        sup = supervised_loss(preds, gts, sc_terms, w.lambda_sc)

        student_preds = _soft_maps(rng, n_unlabeled)
        teacher_preds = _soft_maps(rng, n_unlabeled)
        conf = normalize_confidence(list(rng.random(n_unlabeled)))
        unsup = unsupervised_loss(student_preds, teacher_preds, conf)

        teacher = ema_update(teacher, student, w.lambda_d)
        records.append(
            StepRecord(
                step=step,
                supervised=sup,
                unsupervised=unsup,
                total=total_loss(sup, unsup, w.lambda_u),
                weight_sum=float(sum(conf.weights)),
                gap=float(np.abs(teacher - student).max()),
            )
        )
    return records


def records_to_dict(cfg: SSLoopConfig, records: list[StepRecord]) -> dict:
    """JSON-ready log of the run: config echo plus per-step records."""
    return {
        "config": {
            "steps": cfg.steps,
            "labeled_batch": min(cfg.labeled_batch, BATCH_CAP),
            "unlabeled_batch": min(cfg.unlabeled_batch, BATCH_CAP),
            "seed": cfg.seed,
            "lambda_sc": cfg.weights.lambda_sc,
            "lambda_u": cfg.weights.lambda_u,
            "lambda_d": cfg.weights.lambda_d,
        },
        "steps": [
            {
                "step": r.step,
                "supervised": r.supervised,
                "unsupervised": r.unsupervised,
                "total": r.total,
                "weight_sum": r.weight_sum,
                "gap": r.gap,
            }
            for r in records
        ],
    }
