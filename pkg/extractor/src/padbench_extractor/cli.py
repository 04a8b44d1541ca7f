"""``padbench-extract``: manifest + images -> one embedding file per run."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import ExtractorError
from .backbones import BACKBONE_KEYS, build_extractor
from .manifest import read_manifest
from .roi import RoiSpec, load_image, resize_bilinear, roi_crop


def extract(
    manifest_path,
    backbone: str,
    out_path,
    images_root=None,
    center_column: str | None = None,
    nasnet_variant: str = "mobile",
    batch_size: int = 16,
    weights: str = "pretrained",
    seed: int = 0,
) -> tuple[int, int]:
    """Crop, embed and write; returns (row_count, dim). Rows keep manifest order."""
    from .store import write_embedding_file

    manifest_path = Path(manifest_path)
    rows = read_manifest(manifest_path, center_column)
    if not rows:
        raise ExtractorError(f"manifest {manifest_path} has no samples")
    if batch_size < 1:
        raise ExtractorError(f"batch size must be >= 1, got {batch_size}")
    root = Path(images_root) if images_root is not None else manifest_path.parent

    spec, extractor = build_extractor(backbone, nasnet_variant, weights, seed)
    features = np.empty((len(rows), spec.dim), dtype=np.float32)
    for start in range(0, len(rows), batch_size):
        chunk = rows[start : start + batch_size]
        batch = np.empty((len(chunk), spec.input_size, spec.input_size, 3), dtype=np.uint8)
        for j, row in enumerate(chunk):
            image = load_image(root / row.image_path)
            crop = roi_crop(image, RoiSpec(center=row.center))
            batch[j] = resize_bilinear(crop, spec.input_size)
        out = extractor(batch)
        if out.shape != (len(chunk), spec.dim):
            raise ExtractorError(
                f"{backbone} produced shape {out.shape}, expected ({len(chunk)}, {spec.dim})"
            )
        features[start : start + len(chunk)] = out

    write_embedding_file(out_path, backbone, [r.sample_id for r in rows], features)
    return len(rows), spec.dim


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padbench-extract", description=__doc__)
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--backbone", required=True, choices=BACKBONE_KEYS)
    parser.add_argument("--out", required=True)
    parser.add_argument("--images-root", default=None,
                        help="base for relative image paths (default: manifest directory)")
    parser.add_argument("--roi-center-col", default=None,
                        help="manifest column holding explicit 'x;y' crop centers")
    parser.add_argument("--nasnet-variant", choices=("mobile", "large"), default="mobile")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--weights", choices=("pretrained", "random"), default="pretrained",
                        help="'random' builds seeded randomly-initialized networks (offline)")
    parser.add_argument("--seed", type=int, default=0,
                        help="initialization seed used with --weights random")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        count, dim = extract(
            args.manifest,
            args.backbone,
            args.out,
            images_root=args.images_root,
            center_column=args.roi_center_col,
            nasnet_variant=args.nasnet_variant,
            batch_size=args.batch_size,
            weights=args.weights,
            seed=args.seed,
        )
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {count} x {dim} {args.backbone} embeddings to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
