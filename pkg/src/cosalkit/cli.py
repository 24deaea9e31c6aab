"""Command-line interface.

Subcommands: ``pseudolabel`` (select masks for a dataset), ``evaluate``
(score prediction PNGs against ground truth), ``ssloop-demo`` (seeded
loss-kernel/EMA demo), ``gate-pool`` (split samples by confidence).

Every constant is settable three ways with fixed precedence: a CLI flag
beats ``--config`` JSON beats the built-in default.  Exit codes: 0 on
success, 1 on usage/configuration errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .bench import gate_pool_files, run_evaluate, run_pseudolabel, write_json
from .errors import DataError
from .losses import LossWeights
from .metrics import MetricConfig
from .pseudolabel import PseudoLabelConfig
from .ssloop import SSLoopConfig, records_to_dict, run_ssloop

_CONFIG_KEYS = frozenset(
    {
        "top_k",
        "min_pixel_fraction",
        "overlap_mode",
        "fallback",
        "beta2",
        "alpha",
        "emeasure_eps",
        "lambda_sc",
        "lambda_u",
        "lambda_d",
        "gate_threshold",
        "jobs",
        "seed",
        "steps",
        "labeled_batch",
        "unlabeled_batch",
    }
)


class CliParser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    unknown = sorted(set(config) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return config


def _setting(args: argparse.Namespace, config: dict[str, Any], key: str, default):
    """CLI flag if given, else config value, else the default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _pseudo_config(args, config) -> PseudoLabelConfig:
    return PseudoLabelConfig(
        top_k=int(_setting(args, config, "top_k", 5)),
        min_pixel_fraction=float(_setting(args, config, "min_pixel_fraction", 0.001)),
        overlap_mode=str(_setting(args, config, "overlap_mode", "image-area")),
        fallback=str(_setting(args, config, "fallback", "highest-frequency")),
    )


def _metric_config(args, config) -> MetricConfig:
    return MetricConfig(
        beta2=float(_setting(args, config, "beta2", 0.3)),
        alpha=float(_setting(args, config, "alpha", 0.5)),
        emeasure_eps=float(_setting(args, config, "emeasure_eps", 0.0)),
    )


def _loss_weights(args, config) -> LossWeights:
    return LossWeights(
        lambda_sc=float(_setting(args, config, "lambda_sc", 0.1)),
        lambda_u=float(_setting(args, config, "lambda_u", 1.0)),
        lambda_d=float(_setting(args, config, "lambda_d", 0.95)),
    )


def _cmd_pseudolabel(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    jobs = int(_setting(args, config, "jobs", 1))
    summary = run_pseudolabel(
        root=Path(args.root),
        out=Path(args.out),
        cfg=_pseudo_config(args, config),
        metric_cfg=_metric_config(args, config),
        jobs=jobs,
    )
    print(
        f"pseudolabel: {len(summary.groups)} groups done, "
        f"{len(summary.failures)} failed; outputs in {args.out}"
    )
    return 0 if summary.ok else 2


def _cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    jobs = int(_setting(args, config, "jobs", 1))
    summary = run_evaluate(
        pred_dir=Path(args.pred),
        gt_dir=Path(args.gt),
        out=Path(args.out),
        metric_cfg=_metric_config(args, config),
        jobs=jobs,
    )
    for row in summary.rows:
        print(
            f"{row.name}: mae={row.mae:.4f} fbeta_max={row.fbeta_max:.4f} "
            f"emeasure_max={row.emeasure_max:.4f} smeasure={row.smeasure:.4f}"
        )
    return 0


def _cmd_ssloop_demo(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    cfg = SSLoopConfig(
        steps=int(_setting(args, config, "steps", 8)),
        labeled_batch=int(_setting(args, config, "labeled_batch", 4)),
        unlabeled_batch=int(_setting(args, config, "unlabeled_batch", 6)),
        seed=int(_setting(args, config, "seed", 0)),
        weights=_loss_weights(args, config),
    )
    records = run_ssloop(cfg)
    for r in records:
        print(
            f"step {r.step}: supervised={r.supervised:.6f} "
            f"unsupervised={r.unsupervised:.6f} total={r.total:.6f} "
            f"weight_sum={r.weight_sum:.9f} gap={r.gap:.9f}"
        )
    if args.out is not None:
        write_json(records_to_dict(cfg, records), Path(args.out) / "ssloop.json")
    return 0


def _cmd_gate_pool(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    threshold = float(_setting(args, config, "gate_threshold", 0.9))
    labeled, unlabeled = gate_pool_files(Path(args.scores), Path(args.out), threshold)
    print(f"gate-pool: {len(labeled)} labeled, {len(unlabeled)} unlabeled")
    return 0


def build_parser() -> CliParser:
    parser = CliParser(
        prog="cosalkit",
        description="Pseudo co-saliency mask generation and benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: CliParser) -> None:
        p.add_argument("--config", metavar="JSON", help="JSON config file; flags override it")
        p.add_argument("--jobs", type=int, help="worker threads (default 1)")
        p.add_argument("--seed", type=int, help="random seed (default 0)")

    p = sub.add_parser("pseudolabel", help="select pseudo masks for every group under a root")
    p.add_argument("--root", required=True, help="dataset root containing group directories")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--top-k", type=int, dest="top_k", help="candidate categories per image (default 5)")
    p.add_argument(
        "--min-pixel-fraction",
        type=float,
        dest="min_pixel_fraction",
        help="presence floor as a fraction of image area (default 0.001)",
    )
    p.add_argument(
        "--overlap-mode",
        choices=["image-area", "mask-area"],
        dest="overlap_mode",
        help="overlap denominator (default image-area)",
    )
    p.add_argument(
        "--fallback",
        choices=["highest-frequency", "skip"],
        help="policy when every candidate scores zero (default highest-frequency)",
    )
    p.add_argument("--beta2", type=float, help="F-measure beta^2 (default 0.3)")
    p.add_argument("--alpha", type=float, help="S-measure object/region mix (default 0.5)")
    add_common(p)
    p.set_defaults(func=_cmd_pseudolabel)

    p = sub.add_parser("evaluate", help="score prediction PNGs against ground-truth PNGs")
    p.add_argument("--pred", required=True, help="directory of prediction PNGs")
    p.add_argument("--gt", required=True, help="directory of ground-truth PNGs (a dataset root works)")
    p.add_argument("--out", required=True, help="output directory for benchmark tables")
    p.add_argument("--beta2", type=float, help="F-measure beta^2 (default 0.3)")
    p.add_argument("--alpha", type=float, help="S-measure object/region mix (default 0.5)")
    add_common(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ssloop-demo", help="run the seeded loss-kernel and EMA demo loop")
    p.add_argument("--out", help="directory for the JSON step log (optional)")
    p.add_argument("--steps", type=int, help="number of demo steps (default 8)")
    p.add_argument("--lambda-sc", type=float, dest="lambda_sc", help="SC term weight (default 0.1)")
    p.add_argument("--lambda-u", type=float, dest="lambda_u", help="unsupervised weight (default 1.0)")
    p.add_argument("--lambda-d", type=float, dest="lambda_d", help="teacher EMA decay (default 0.95)")
    add_common(p)
    p.set_defaults(func=_cmd_ssloop_demo)

    p = sub.add_parser("gate-pool", help="split a CSV of (id, score) rows by confidence")
    p.add_argument("scores", help="CSV file of id,score rows")
    p.add_argument("--out", required=True, help="output directory for pool lists")
    p.add_argument(
        "--gate-threshold",
        type=float,
        dest="gate_threshold",
        help="labeled-pool threshold (default 0.9)",
    )
    add_common(p)
    p.set_defaults(func=_cmd_gate_pool)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
