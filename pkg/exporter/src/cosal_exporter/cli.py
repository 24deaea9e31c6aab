"""Command-line interface for the sidecar exporter.

One subcommand, ``export``, which runs a backend over an image directory
and writes attention/cluster sidecars plus a manifest.  Exit codes match
the main toolkit: 0 on success, 1 on usage/configuration errors, 2 when
the export itself fails (backend load, nothing decodable, IO).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .backends import DEFAULT_CLUSTERS, DEFAULT_HEADS
from .errors import ExportError
from .export import ExportJob, export_group


class CliParser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"--size must look like HxW (e.g. 64x64), got {text!r}")
    try:
        height, width = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"--size must hold two integers, got {text!r}") from None
    return height, width


def _cmd_export(args: argparse.Namespace) -> int:
    height, width = _parse_size(args.size)
    job = ExportJob(
        images_dir=Path(args.images),
        out_dir=Path(args.out),
        height=height,
        width=width,
        model=args.model,
        n_heads=args.heads,
        n_clusters=args.clusters,
        device=args.device,
    )
    manifest = export_group(job)
    print(
        f"export: {len(manifest['images'])} images exported, "
        f"{len(manifest['skipped'])} skipped; manifest in {args.out}"
    )
    return 0


def build_parser() -> CliParser:
    parser = CliParser(
        prog="cosal-export",
        description="Export attention and cluster-label sidecars for an image directory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="write .attn.plane/.clus.plane sidecars and a manifest")
    p.add_argument("--images", required=True, help="directory of input images")
    p.add_argument("--out", required=True, help="output directory for sidecars")
    p.add_argument("--size", required=True, metavar="HxW", help="common target resolution, e.g. 64x64")
    p.add_argument(
        "--model",
        choices=["builtin", "dino"],
        default="builtin",
        help="backend producing attention and clusters (default builtin)",
    )
    p.add_argument("--heads", type=int, default=DEFAULT_HEADS, help="attention heads to emit (default 6)")
    p.add_argument(
        "--clusters",
        type=int,
        default=DEFAULT_CLUSTERS,
        help="cluster-label categories to fit (default 4)",
    )
    p.add_argument("--device", default="cpu", help="device hint for model backends (default cpu)")
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExportError as exc:
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
