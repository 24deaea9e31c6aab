"""Frequency-statistics pseudo co-saliency masks, loss kernels, and metrics.

The package splits into sidecar/tensor IO (:mod:`cosalkit.planes`,
:mod:`cosalkit.dataset`), the pseudo-label selection algorithm
(:mod:`cosalkit.pseudolabel`), training-loss kernels
(:mod:`cosalkit.losses`), evaluation measures (:mod:`cosalkit.metrics`),
and the benchmark harness behind the ``cosalkit`` CLI
(:mod:`cosalkit.bench`, :mod:`cosalkit.ssloop`, :mod:`cosalkit.cli`).
"""

from .errors import (
    BadMagicError,
    DataError,
    DatasetLayoutError,
    DimMismatchError,
    DimOverflowError,
    MaskError,
    MissingSidecarError,
    NoGroupsError,
    NonFiniteError,
    PlaneFormatError,
    TruncatedPayloadError,
    WrongColorTypeError,
)
from .planes import (
    AttentionStack,
    BinaryMask,
    ClusterMap,
    FloatPlane,
    read_plane_file,
    write_plane_file,
)
from .dataset import (
    GroupBundle,
    GroupEntry,
    discover_groups,
    load_group,
    read_mask_png,
    read_soft_png,
    write_mask_png,
)
from .pseudolabel import (
    PseudoLabelConfig,
    PseudoLabelResult,
    average_attention,
    category_frequency,
    otsu_binarize,
    otsu_split,
    overlap_score,
    select_pseudo_masks,
    top_k_categories,
)
from .losses import (
    ConfidenceBatch,
    LossWeights,
    cen_mse,
    cen_target,
    cosine_similarity,
    ema_update,
    gate_unlabeled_pool,
    iou_loss,
    masked_avg_prototype,
    normalize_confidence,
    sc_loss,
    supervised_loss,
    total_loss,
    unsupervised_loss,
)
from .metrics import (
    MetricConfig,
    MetricReport,
    aggregate,
    emeasure_max,
    evaluate_pair,
    fbeta_max,
    mae,
    pr_curves,
    smeasure,
)
from .bench import RunSummary, run_evaluate, run_pseudolabel
from .ssloop import SSLoopConfig, StepRecord, run_ssloop

__version__ = "0.1.0"

__all__ = [
    "AttentionStack",
    "BadMagicError",
    "BinaryMask",
    "ClusterMap",
    "ConfidenceBatch",
    "DataError",
    "DatasetLayoutError",
    "DimMismatchError",
    "DimOverflowError",
    "FloatPlane",
    "GroupBundle",
    "GroupEntry",
    "LossWeights",
    "MaskError",
    "MetricConfig",
    "MetricReport",
    "MissingSidecarError",
    "NoGroupsError",
    "NonFiniteError",
    "PlaneFormatError",
    "PseudoLabelConfig",
    "PseudoLabelResult",
    "RunSummary",
    "SSLoopConfig",
    "StepRecord",
    "TruncatedPayloadError",
    "WrongColorTypeError",
    "aggregate",
    "average_attention",
    "category_frequency",
    "cen_mse",
    "cen_target",
    "cosine_similarity",
    "discover_groups",
    "emeasure_max",
    "ema_update",
    "evaluate_pair",
    "fbeta_max",
    "gate_unlabeled_pool",
    "iou_loss",
    "load_group",
    "mae",
    "masked_avg_prototype",
    "normalize_confidence",
    "otsu_binarize",
    "otsu_split",
    "overlap_score",
    "pr_curves",
    "read_mask_png",
    "read_plane_file",
    "read_soft_png",
    "run_evaluate",
    "run_pseudolabel",
    "run_ssloop",
    "sc_loss",
    "select_pseudo_masks",
    "smeasure",
    "supervised_loss",
    "top_k_categories",
    "total_loss",
    "unsupervised_loss",
    "write_mask_png",
    "write_plane_file",
]
