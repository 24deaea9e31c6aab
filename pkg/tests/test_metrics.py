"""Evaluation measures: MAE, max F-measure, max E-measure, S-measure."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cosalkit.errors import DimMismatchError
from cosalkit.metrics import (
    MetricConfig,
    aggregate,
    emeasure_max,
    evaluate_pair,
    fbeta_max,
    mae,
    pr_curves,
    smeasure,
    threshold_sweep,
)

from oracles import (
    oracle_emeasure_max,
    oracle_fbeta_max,
    oracle_mae,
    oracle_smeasure,
)

_shapes = st.tuples(st.integers(1, 8), st.integers(1, 8))


def _pair(data, allow_empty=True):
    shape = data.draw(_shapes)
    pred = data.draw(arrays(np.float64, shape, elements=st.floats(0, 1)))
    gt = data.draw(arrays(np.bool_, shape))
    if not allow_empty and not gt.any():
        gt = gt.copy()
        gt.ravel()[0] = True
    return pred, gt


def _mixed_gt(rng, shape=(6, 6)):
    """A binary mask guaranteed to have both foreground and background."""
    g = rng.random(shape) < 0.5
    g.ravel()[0] = True
    g.ravel()[-1] = False
    return g


# --- MAE ---------------------------------------------------------------------


def test_mae_zero_on_equal_maps():
    rng = np.random.default_rng(0)
    gt = rng.random((5, 5)) >= 0.5
    assert mae(gt.astype(float), gt) == 0.0


def test_mae_constant_half():
    gt = np.zeros((4, 4), dtype=bool)
    gt[:2] = True
    assert mae(np.full((4, 4), 0.5), gt) == 0.5


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_mae_matches_scalar_oracle(data):
    pred, gt = _pair(data)
    assert mae(pred, gt) == pytest.approx(oracle_mae(pred, gt), abs=1e-12)


def test_mae_complement_invariance():
    rng = np.random.default_rng(1)
    pred = rng.random((6, 6))
    gt = _mixed_gt(rng)
    assert mae(pred, gt) == pytest.approx(mae(1.0 - pred, ~gt), abs=1e-12)


def test_mae_shape_mismatch():
    with pytest.raises(DimMismatchError):
        mae(np.zeros((2, 2)), np.zeros((3, 3), dtype=bool))


# --- F-measure ---------------------------------------------------------------


def test_fbeta_perfect_prediction_is_exactly_one():
    rng = np.random.default_rng(2)
    for _ in range(20):
        gt = _mixed_gt(rng)
        assert fbeta_max(gt.astype(np.float64), gt) == 1.0


def test_fbeta_complement_prediction_is_zero():
    gt = np.zeros((4, 4), dtype=bool)
    gt[1:3, 1:3] = True
    assert fbeta_max((~gt).astype(np.float64), gt) == 0.0


def test_fbeta_empty_gt_scores_one():
    # The top threshold always empties the prediction, which counts as a
    # correct detection of "nothing".
    gt = np.zeros((3, 3), dtype=bool)
    assert fbeta_max(np.random.default_rng(3).random((3, 3)), gt) == 1.0
    assert fbeta_max(np.ones((3, 3)), gt) == 1.0


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_fbeta_matches_pointwise_oracle(data):
    pred, gt = _pair(data)
    assert fbeta_max(pred, gt) == pytest.approx(
        oracle_fbeta_max(pred, gt, 0.3), abs=1e-9
    )


def test_fbeta_improves_when_pred_moves_toward_gt():
    rng = np.random.default_rng(4)
    for _ in range(10):
        gt = _mixed_gt(rng)
        pred = rng.random((6, 6))
        u, v = rng.random(2) * 0.5
        better = np.where(gt, pred + (1.0 - pred) * u, pred * (1.0 - v))
        assert fbeta_max(better, gt) >= fbeta_max(pred, gt) - 1e-12


def test_fbeta_beta2_weighting():
    # One of four foreground pixels hit, no false positives: P=1, R=1/4.
    gt = np.zeros((4, 4), dtype=bool)
    gt[0] = True
    pred = np.zeros((4, 4))
    pred[0, 0] = 1.0
    expected = lambda b2: (1 + b2) * 0.25 / (b2 + 0.25)
    assert fbeta_max(pred, gt, beta2=0.3) == pytest.approx(expected(0.3), abs=1e-12)
    assert fbeta_max(pred, gt, beta2=1.0) == pytest.approx(expected(1.0), abs=1e-12)


def test_pr_curves_shape_and_endpoints():
    rng = np.random.default_rng(5)
    pred = rng.random((6, 6))
    gt = _mixed_gt(rng)
    precision, recall = pr_curves(pred, gt)
    assert precision.shape == recall.shape == (256,)
    assert recall[0] == 1.0  # threshold 0 keeps every pixel
    assert np.all(np.diff(recall) <= 1e-12)  # recall never increases


def test_threshold_sweep_values():
    sweep = threshold_sweep()
    assert sweep.shape == (256,)
    assert sweep[0] == 0.0 and sweep[-1] == 1.0
    assert sweep[51] == 51 / 255


# --- E-measure ---------------------------------------------------------------


def test_emeasure_perfect_prediction_is_exactly_one():
    rng = np.random.default_rng(6)
    for _ in range(20):
        gt = _mixed_gt(rng)
        assert emeasure_max(gt.astype(np.float64), gt) == 1.0


def test_emeasure_empty_gt_empty_pred():
    gt = np.zeros((4, 4), dtype=bool)
    assert emeasure_max(np.zeros((4, 4)), gt) == 1.0


def test_emeasure_empty_gt_uses_one_minus_mean():
    gt = np.zeros((4, 4), dtype=bool)
    # Best threshold empties the prediction entirely: 1 - 0 = 1.
    assert emeasure_max(np.full((4, 4), 0.3), gt) == 1.0


def test_emeasure_full_gt_uses_mean():
    gt = np.ones((4, 4), dtype=bool)
    assert emeasure_max(np.ones((4, 4)), gt) == 1.0
    # Half the pixels survive every useful threshold: best mean is 0.5.
    pred = np.zeros((4, 4))
    pred[:2] = 1.0
    assert emeasure_max(pred, gt) == 0.5


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_emeasure_matches_pointwise_oracle(data):
    pred, gt = _pair(data)
    assert emeasure_max(pred, gt) == pytest.approx(
        oracle_emeasure_max(pred, gt), abs=1e-9
    )


def test_emeasure_eps_smooths_alignment():
    rng = np.random.default_rng(7)
    pred = rng.random((6, 6))
    gt = _mixed_gt(rng)
    strict = emeasure_max(pred, gt, eps=0.0)
    smoothed = emeasure_max(pred, gt, eps=1e-8)
    assert smoothed == pytest.approx(strict, abs=1e-6)
    assert smoothed == pytest.approx(oracle_emeasure_max(pred, gt, eps=1e-8), abs=1e-9)


# --- S-measure ---------------------------------------------------------------


def test_smeasure_perfect_prediction_is_exactly_one():
    rng = np.random.default_rng(8)
    for _ in range(20):
        gt = _mixed_gt(rng)
        assert smeasure(gt.astype(np.float64), gt) == 1.0


def test_smeasure_empty_gt_edge_rule():
    gt = np.zeros((4, 4), dtype=bool)
    assert smeasure(np.zeros((4, 4)), gt) == 1.0
    assert smeasure(np.full((4, 4), 0.25), gt) == 0.75


def test_smeasure_full_gt_edge_rule():
    gt = np.ones((4, 4), dtype=bool)
    assert smeasure(np.ones((4, 4)), gt) == 1.0
    assert smeasure(np.full((4, 4), 0.25), gt) == 0.25


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_smeasure_matches_straight_line_oracle(data):
    pred, gt = _pair(data)
    assert smeasure(pred, gt) == pytest.approx(oracle_smeasure(pred, gt), abs=1e-9)


def test_smeasure_single_pixel_foreground():
    for pos in ((0, 0), (3, 3), (1, 2)):
        gt = np.zeros((4, 4), dtype=bool)
        gt[pos] = True
        pred = np.random.default_rng(9).random((4, 4))
        assert smeasure(pred, gt) == pytest.approx(oracle_smeasure(pred, gt), abs=1e-9)


def test_smeasure_centroid_rounding_cases():
    # Foregrounds whose centroid lands exactly on .5 exercise the
    # round-half-even rule in both implementations.
    gt = np.zeros((4, 6), dtype=bool)
    gt[1:3, 2:4] = True  # centroid rows {2,3}, cols {3,4} (1-based)
    rng = np.random.default_rng(10)
    for _ in range(5):
        pred = rng.random((4, 6))
        assert smeasure(pred, gt) == pytest.approx(oracle_smeasure(pred, gt), abs=1e-9)


def test_smeasure_stays_in_unit_interval():
    rng = np.random.default_rng(11)
    for _ in range(50):
        pred = rng.random((5, 5))
        gt = rng.random((5, 5)) < 0.3
        assert 0.0 <= smeasure(pred, gt) <= 1.0


# --- report plumbing ---------------------------------------------------------


def test_evaluate_pair_consistency():
    rng = np.random.default_rng(12)
    pred = rng.random((6, 6))
    gt = _mixed_gt(rng)
    report = evaluate_pair(pred, gt)
    assert report.mae == mae(pred, gt)
    assert report.fbeta_max == fbeta_max(pred, gt)
    assert report.emeasure_max == emeasure_max(pred, gt)
    assert report.smeasure == smeasure(pred, gt)
    assert len(report.precision) == len(report.recall) == 256


def test_aggregate_single_report_identity():
    rng = np.random.default_rng(13)
    report = evaluate_pair(rng.random((4, 4)), _mixed_gt(rng, (4, 4)))
    merged = aggregate([report])
    assert merged.mae == report.mae
    assert merged.smeasure == report.smeasure
    assert merged.precision == report.precision


def test_aggregate_means_fields():
    rng = np.random.default_rng(14)
    reports = [
        evaluate_pair(rng.random((4, 4)), _mixed_gt(rng, (4, 4))) for _ in range(3)
    ]
    merged = aggregate(reports)
    assert merged.mae == pytest.approx(sum(r.mae for r in reports) / 3, abs=1e-15)
    assert merged.fbeta_max == pytest.approx(
        sum(r.fbeta_max for r in reports) / 3, abs=1e-15
    )
    assert merged.precision[10] == pytest.approx(
        sum(r.precision[10] for r in reports) / 3, abs=1e-15
    )


def test_aggregate_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        aggregate([])
    rng = np.random.default_rng(15)
    a = evaluate_pair(rng.random((4, 4)), _mixed_gt(rng, (4, 4)))
    b = evaluate_pair(
        rng.random((4, 4)), _mixed_gt(rng, (4, 4)), MetricConfig(n_thresholds=128)
    )
    with pytest.raises(DimMismatchError):
        aggregate([a, b])


def test_pred_validation():
    with pytest.raises(ValueError):
        mae(np.full((2, 2), 1.5), np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        mae(np.full((2, 2), -0.1), np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        mae(np.full((2, 2), 0.5), np.full((2, 2), 0.5))  # non-binary gt


def test_metric_config_validation():
    with pytest.raises(ValueError):
        MetricConfig(beta2=0.0)
    with pytest.raises(ValueError):
        MetricConfig(alpha=1.5)
    with pytest.raises(ValueError):
        MetricConfig(n_thresholds=1)
