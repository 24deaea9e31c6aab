"""Benchmark orchestration: pseudo-label runs, evaluation runs, reports.

Every artifact this module writes is byte-deterministic: groups are
processed in sorted order (worker threads only compute; the main thread
writes), JSON is emitted with sorted keys, CSV in RFC-4180 form, and
PNG masks without compression so the bytes do not depend on the local
zlib build.
"""

from __future__ import annotations

import json
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO

from .dataset import (
    GT_SUFFIX,
    GroupBundle,
    discover_groups,
    load_group,
    read_mask_png,
    read_soft_png,
    write_mask_png,
)
from .errors import DataError
from .metrics import MetricConfig, MetricReport, aggregate, evaluate_pair
from .pseudolabel import PseudoLabelConfig, PseudoLabelResult, select_pseudo_masks

MASKS_DIRNAME = "CM"
REPORTS_DIRNAME = "reports"
CSV_FILENAME = "benchmark.csv"
MD_FILENAME = "benchmark.md"
AGGREGATE_ROW_NAME = "all"


@dataclass(frozen=True)
class BenchmarkRow:
    """One table row: an evaluated unit and its four measures."""

    name: str
    mae: float
    fbeta_max: float
    emeasure_max: float
    smeasure: float


@dataclass(frozen=True)
class RunSummary:
    """Outcome of a benchmark run: per-group results and failures."""

    groups: tuple[str, ...]
    failures: tuple[tuple[str, str], ...]
    rows: tuple[BenchmarkRow, ...]

    @property
    def ok(self) -> bool:
        return not self.failures and bool(self.groups)


def _row_from_report(name: str, report: MetricReport) -> BenchmarkRow:
    return BenchmarkRow(
        name=name,
        mae=report.mae,
        fbeta_max=report.fbeta_max,
        emeasure_max=report.emeasure_max,
        smeasure=report.smeasure,
    )


def result_to_report_dict(result: PseudoLabelResult) -> dict:
    """JSON-ready view of a group's selection: frequencies, winners,
    candidate scores, and fallback diagnostics."""
    return {
        "group": result.group_name,
        "frequencies": {str(c): n for c, n in sorted(result.frequencies.items())},
        "images": [
            {
                "id": sel.image_id,
                "selected_category": sel.selected_category,
                "fallback_used": sel.fallback_used,
                "otsu_degenerate": sel.otsu_degenerate,
                "candidates": [
                    {
                        "category": cand.category,
                        "frequency": cand.frequency,
                        "score": cand.score,
                    }
                    for cand in sel.candidates
                ],
            }
            for sel in result.selections
        ],
    }


def write_json(payload: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_benchmark_csv(rows: list[BenchmarkRow], path: Path) -> None:
    """RFC-4180 CSV (CRLF rows); floats at full repr precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["group", "mae", "fbeta_max", "emeasure_max", "smeasure"])
        for row in rows:
            writer.writerow(
                [row.name, repr(row.mae), repr(row.fbeta_max),
                 repr(row.emeasure_max), repr(row.smeasure)]
            )


def write_benchmark_md(rows: list[BenchmarkRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        "| Group | MAE | F-beta max | E-measure max | S-measure |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in rows:
        lines.append(
            f"| {row.name} | {row.mae:.4f} | {row.fbeta_max:.4f} "
            f"| {row.emeasure_max:.4f} | {row.smeasure:.4f} |"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _score_group(
    bundle: GroupBundle, result: PseudoLabelResult, cfg: MetricConfig
) -> list[MetricReport]:
    """Metric reports for every image in the group that has ground truth."""
    reports = []
    for entry, sel in zip(bundle.entries, result.selections):
        if entry.gt is None:
            continue
        pred = sel.mask.bits.astype(float)
        reports.append(evaluate_pair(pred, entry.gt.bits, cfg))
    return reports


def _tabulate(per_group: list[tuple[str, list[MetricReport]]]) -> list[BenchmarkRow]:
    """Per-group rows plus an image-weighted aggregate row over all images."""
    rows = []
    all_reports: list[MetricReport] = []
    for name, reports in per_group:
        if not reports:
            continue
        rows.append(_row_from_report(name, aggregate(reports)))
        all_reports.extend(reports)
    if all_reports:
        rows.append(_row_from_report(AGGREGATE_ROW_NAME, aggregate(all_reports)))
    return rows


def run_pseudolabel(
    root: Path,
    out: Path,
    cfg: PseudoLabelConfig = PseudoLabelConfig(),
    metric_cfg: MetricConfig = MetricConfig(),
    jobs: int = 1,
    log: Optional[TextIO] = None,
) -> RunSummary:
    """Select pseudo masks for every group under root and write artifacts.

    Per group: CM/<group>/<id>.png masks and reports/<group>.json.  If
    any image carries ground truth, also benchmark.csv and benchmark.md
    scoring the selected masks.  A failing group is reported and skipped
    without aborting the others.
    """
    log = log if log is not None else sys.stderr
    group_dirs = discover_groups(root)

    def process(group_dir: Path):
        bundle = load_group(group_dir)
        result = select_pseudo_masks(bundle, cfg)
        reports = _score_group(bundle, result, metric_cfg)
        return result, reports

    outcomes: list[tuple[str, object]] = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [(d.name, pool.submit(process, d)) for d in group_dirs]
        for name, future in futures:
            try:
                outcomes.append((name, future.result()))
            except DataError as exc:
                outcomes.append((name, exc))

    done: list[str] = []
    failures: list[tuple[str, str]] = []
    per_group_reports: list[tuple[str, list[MetricReport]]] = []
    for name, outcome in sorted(outcomes, key=lambda item: item[0]):
        if isinstance(outcome, DataError):
            failures.append((name, str(outcome)))
            print(f"group {name}: {outcome}", file=log)
            continue
        result, reports = outcome
        for sel in result.selections:
            write_mask_png(sel.mask, out / MASKS_DIRNAME / name / f"{sel.image_id}.png")
        write_json(result_to_report_dict(result), out / REPORTS_DIRNAME / f"{name}.json")
        per_group_reports.append((name, reports))
        done.append(name)

    rows = _tabulate(per_group_reports)
    if rows:
        write_benchmark_csv(rows, out / CSV_FILENAME)
        write_benchmark_md(rows, out / MD_FILENAME)
    return RunSummary(tuple(done), tuple(failures), tuple(rows))


def _collect_pngs(root: Path) -> dict[str, Path]:
    """Relative-POSIX-path index of every .png under root, GT sidecars
    normalized to their plain name (``a/b.gt.png`` keys as ``a/b.png``)."""
    found: dict[str, Path] = {}
    for path in sorted(root.rglob("*.png")):
        rel = path.relative_to(root).as_posix()
        if rel.endswith(GT_SUFFIX):
            rel = rel[: -len(GT_SUFFIX)] + ".png"
            found[rel] = path  # GT sidecar wins over a same-named source image
        elif rel not in found:
            found[rel] = path
    return found


def run_evaluate(
    pred_dir: Path,
    gt_dir: Path,
    out: Path,
    metric_cfg: MetricConfig = MetricConfig(),
    jobs: int = 1,
    log: Optional[TextIO] = None,
) -> RunSummary:
    """Score prediction PNGs against ground-truth PNGs by matching name.

    Files pair up by relative path; in the GT directory a ``.gt.png``
    sidecar stands in for ``.png``, so a dataset root works directly as
    the GT side.  Unmatched files are warned about and skipped; rows are
    grouped by the first path component.
    """
    log = log if log is not None else sys.stderr
    preds = _collect_pngs(pred_dir)
    gts = _collect_pngs(gt_dir)

    matched = sorted(set(preds) & set(gts))
    for rel in sorted(set(preds) ^ set(gts)):
        side = "prediction" if rel in preds else "ground truth"
        print(f"unmatched {side} file: {rel}", file=log)
    if not matched:
        raise DataError("no prediction/ground-truth pairs matched")

    def score(rel: str) -> MetricReport:
        pred = read_soft_png(preds[rel])
        gt = read_mask_png(gts[rel])
        return evaluate_pair(pred, gt.bits, metric_cfg)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(pool.map(score, matched))

    by_unit: dict[str, list[MetricReport]] = {}
    for rel, report in zip(matched, reports):
        unit = rel.split("/", 1)[0] if "/" in rel else "."
        by_unit.setdefault(unit, []).append(report)

    rows = _tabulate(sorted(by_unit.items()))
    write_benchmark_csv(rows, out / CSV_FILENAME)
    write_benchmark_md(rows, out / MD_FILENAME)
    return RunSummary(tuple(sorted(by_unit)), (), tuple(rows))


def gate_pool_files(
    score_csv: Path, out: Path, threshold: float = 0.9
) -> tuple[list[str], list[str]]:
    """Split a CSV of (id, score) rows into labeled/unlabeled pool lists.

    Writes ``labeled.txt`` and ``unlabeled.txt`` (one id per line) under
    out and returns the two id lists.
    """
    labeled: list[str] = []
    unlabeled: list[str] = []
    try:
        with open(score_csv, "r", encoding="utf-8", newline="") as f:
            for lineno, row in enumerate(csv.reader(f), start=1):
                if not row:
                    continue
                if len(row) != 2:
                    raise DataError(
                        f"{score_csv}:{lineno}: expected 'id,score', got {row!r}"
                    )
                sample_id, raw = row[0].strip(), row[1].strip()
                try:
                    score = float(raw)
                except ValueError:
                    raise DataError(
                        f"{score_csv}:{lineno}: score {raw!r} is not a number"
                    ) from None
                (labeled if score >= threshold else unlabeled).append(sample_id)
    except OSError as exc:
        raise DataError(f"cannot read score file {score_csv}: {exc}") from exc

    out.mkdir(parents=True, exist_ok=True)
    for name, ids in (("labeled.txt", labeled), ("unlabeled.txt", unlabeled)):
        with open(out / name, "w", encoding="utf-8", newline="\n") as f:
            f.writelines(f"{sample_id}\n" for sample_id in ids)
    return labeled, unlabeled
