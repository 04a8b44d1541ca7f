"""Writer for the benchmark's embedding interchange format.

Layout (little-endian): magic ``PDBE`` | u16 version=1 | u8 backbone id |
u32 dim | u64 row count | per row u16 id length + UTF-8 id | row-major
float32 payload. This mirrors the consumer-side contract; the extractor
owns only the writing half.
"""

from __future__ import annotations

import struct

import numpy as np

from . import ExtractorError

MAGIC = b"PDBE"
FORMAT_VERSION = 1

WIRE_IDS = {
    "alexnet": 1,
    "googlenet": 2,
    "resnet50": 3,
    "densenet201": 4,
    "mobilenet_v2": 5,
    "efficientnet_b0": 6,
    "nasnet": 7,
    "vit": 8,
}


def write_embedding_file(destination, backbone_key: str, sample_ids: list[str],
                         values: np.ndarray) -> None:
    if backbone_key not in WIRE_IDS:
        raise ExtractorError(f"unknown backbone {backbone_key!r}")
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2 or values.shape[0] != len(sample_ids):
        raise ExtractorError(
            f"values shape {values.shape} does not match {len(sample_ids)} sample ids"
        )
    if not np.isfinite(values).all():
        raise ExtractorError("refusing to write non-finite feature values")
    if len(set(sample_ids)) != len(sample_ids):
        raise ExtractorError("duplicate sample ids")

    parts = [
        struct.pack(
            "<4sHBIQ", MAGIC, FORMAT_VERSION, WIRE_IDS[backbone_key],
            values.shape[1], values.shape[0],
        )
    ]
    for sample_id in sample_ids:
        encoded = sample_id.encode("utf-8")
        if not encoded or len(encoded) > 0xFFFF:
            raise ExtractorError(f"bad sample id {sample_id!r}")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
    parts.append(values.tobytes(order="C"))
    with open(destination, "wb") as handle:
        handle.write(b"".join(parts))
