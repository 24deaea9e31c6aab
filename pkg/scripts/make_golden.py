"""Regenerate the committed test fixture and its golden outputs.

Builds a small three-group dataset with soft attention maps, cluster
maps, and (for two groups) ground-truth masks, then runs the full
pseudo-label pipeline over it and stores the results under
tests/data/golden.  Byte-identity tests compare fresh runs against
these files, so rerun this script only when the pipeline's output
format intentionally changes.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from cosalkit.bench import run_pseudolabel
from cosalkit.dataset import write_mask_png
from cosalkit.metrics import MetricConfig
from cosalkit.planes import AttentionStack, BinaryMask, ClusterMap, write_plane_file
from cosalkit.pseudolabel import PseudoLabelConfig

FIXTURE = REPO / "tests" / "data" / "fixture"
GOLDEN = REPO / "tests" / "data" / "golden"


def _ellipse(shape, cy, cx, ry, rx):
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0


def _dilate(mask, r=2):
    out = mask.copy()
    h, w = mask.shape
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            ys = slice(max(dy, 0), min(h + dy, h))
            xs = slice(max(dx, 0), min(w + dx, w))
            yt = slice(max(-dy, 0), min(h - dy, h))
            xt = slice(max(-dx, 0), min(w - dx, w))
            out[yt, xt] |= mask[ys, xs]
    return out


def _attention(rng, fg, n_heads=4, constant=None):
    h, w = fg.shape
    if constant is not None:
        return np.full((n_heads, h, w), constant, dtype=np.float32)
    yy, xx = np.mgrid[0:h, 0:w]
    rows, cols = np.nonzero(fg)
    cy, cx = rows.mean(), cols.mean()
    dist2 = ((yy - cy) / (h / 4)) ** 2 + ((xx - cx) / (w / 4)) ** 2
    planes = []
    for head in range(n_heads):
        base = 0.15 + 0.7 * np.exp(-1.2 * dist2) + 0.02 * head
        noisy = base + 0.04 * rng.standard_normal((h, w))
        planes.append(np.clip(noisy, 0.0, 1.0))
    return np.stack(planes).astype(np.float32)


def _clusters(fg, extra_patch=None):
    labels = np.zeros(fg.shape, dtype=np.int32)
    labels[_dilate(fg)] = 1
    labels[-5:, :] = 2  # ever-present low-overlap band
    if extra_patch is not None:
        labels[extra_patch] = 3
    return labels


def _write_image(group_dir, image_id, attention, clusters, gt=None):
    group_dir.mkdir(parents=True, exist_ok=True)
    write_plane_file(AttentionStack(attention), group_dir / f"{image_id}.attn.plane")
    write_plane_file(ClusterMap(clusters), group_dir / f"{image_id}.clus.plane")
    if gt is not None:
        write_mask_png(BinaryMask(gt), group_dir / f"{image_id}.gt.png")


def build_fixture(root: Path) -> None:
    if root.exists():
        shutil.rmtree(root)

    for i in range(4):
        rng = np.random.default_rng([20260825, 0, i])
        shape = (24, 40) if i == 3 else (32, 32)
        fg = _ellipse(shape, 10 + 2 * i, 12 + 2 * i, 6, 8)
        patch = (slice(2, 7), slice(shape[1] - 8, shape[1] - 2)) if i < 2 else None
        _write_image(
            root / "birds",
            f"b{i}",
            _attention(rng, fg),
            _clusters(fg, patch),
            gt=fg,
        )

    for i in range(4):
        rng = np.random.default_rng([20260825, 1, i])
        fg = _ellipse((32, 32), 16, 10 + 3 * i, 7, 6)
        constant = 0.4 if i == 2 else None  # degenerate attention image
        _write_image(
            root / "cats",
            f"c{i}",
            _attention(rng, fg, constant=constant),
            _clusters(fg),
            gt=fg,
        )

    for i in range(4):
        rng = np.random.default_rng([20260825, 2, i])
        fg = _ellipse((32, 32), 12 + i, 16, 5, 9)
        _write_image(root / "rocks", f"r{i}", _attention(rng, fg), _clusters(fg))


def build_golden(fixture: Path, golden: Path) -> None:
    if golden.exists():
        shutil.rmtree(golden)
    summary = run_pseudolabel(
        fixture,
        golden,
        PseudoLabelConfig(),
        MetricConfig(),
        jobs=2,
    )
    for name in summary.groups:
        report = json.loads((golden / "reports" / f"{name}.json").read_text())
        for image in report["images"]:
            flag = " (fallback)" if image["fallback_used"] else ""
            print(f"{name}/{image['id']}: category={image['selected_category']}{flag}")
    for row in summary.rows:
        print(
            f"{row.name}: mae={row.mae:.4f} fbeta={row.fbeta_max:.4f} "
            f"emeasure={row.emeasure_max:.4f} smeasure={row.smeasure:.4f}"
        )


def main() -> int:
    build_fixture(FIXTURE)
    build_golden(FIXTURE, GOLDEN)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
