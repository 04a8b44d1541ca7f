"""Tolerant manifest reading for the extractor.

Accepts the benchmark manifest schema plus any extra columns. Only
``sample_id`` and ``image_path`` are required here; an optional
per-sample ROI-center column (named on the command line) may carry
explicit "x;y" pixel coordinates that override the automatic finger
localization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from . import ExtractorError


@dataclass(frozen=True)
class ManifestRow:
    sample_id: str
    image_path: str
    center: tuple[int, int] | None


def parse_center(raw: str) -> tuple[int, int]:
    parts = raw.strip().split(";")
    if len(parts) != 2:
        raise ValueError(f"expected 'x;y', got {raw!r}")
    return int(parts[0]), int(parts[1])


def read_manifest(path, center_column: str | None = None) -> list[ManifestRow]:
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ExtractorError(f"cannot read manifest {path}: {exc}") from None
    with handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        for required in ("sample_id", "image_path"):
            if required not in fields:
                raise ExtractorError(f"manifest {path} is missing column {required!r}")
        if center_column is not None and center_column not in fields:
            raise ExtractorError(f"manifest {path} has no column {center_column!r}")
        rows: list[ManifestRow] = []
        seen: set[str] = set()
        for line_num, row in enumerate(reader, start=2):
            sample_id = (row.get("sample_id") or "").strip()
            image_path = row.get("image_path") or ""
            if not sample_id:
                raise ExtractorError(f"manifest line {line_num}: empty sample_id")
            if sample_id in seen:
                raise ExtractorError(f"manifest line {line_num}: duplicate sample_id {sample_id!r}")
            seen.add(sample_id)
            center = None
            if center_column is not None:
                raw = (row.get(center_column) or "").strip()
                if raw:
                    try:
                        center = parse_center(raw)
                    except ValueError as exc:
                        raise ExtractorError(f"manifest line {line_num}: {exc}") from None
            rows.append(ManifestRow(sample_id=sample_id, image_path=image_path, center=center))
    return rows
