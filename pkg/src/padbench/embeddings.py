"""Backbone catalogue and the binary per-sample embedding file format.

File layout (all integers little-endian)::

    magic  b"PDBE"
    u16    format version (currently 1)
    u8     backbone id
    u32    feature dimension
    u64    row count
    per row: u16 id byte-length + UTF-8 sample id
    payload: row_count * dim float32, row-major

One file holds the embeddings of one backbone over one dataset. Files are
immutable once written; readers may share them freely.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import AlignmentError, EmbeddingFormatError
from .manifest import DatasetManifest

MAGIC = b"PDBE"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHBIQ")


class Backbone(Enum):
    """The eight feature extractors, with their wire id and feature dimension.

    NASNet's dimension depends on the variant (mobile 1056, large 4032) and is
    therefore carried by the file header instead of the catalogue; readers
    check it for internal consistency only.
    """

    ALEXNET = ("alexnet", 1, "AlexNet", 4096)
    GOOGLENET = ("googlenet", 2, "GoogleNet", 1024)
    RESNET50 = ("resnet50", 3, "ResNet50", 2048)
    DENSENET201 = ("densenet201", 4, "DenseNet201", 1920)
    MOBILENET_V2 = ("mobilenet_v2", 5, "MobileNet-V2", 1280)
    EFFICIENTNET_B0 = ("efficientnet_b0", 6, "EfficientNet-B0", 1280)
    NASNET = ("nasnet", 7, "NasNet", None)
    VIT = ("vit", 8, "ViT", 768)

    def __init__(self, key: str, wire_id: int, display_name: str, expected_dim: int | None):
        self.key = key
        self.wire_id = wire_id
        self.display_name = display_name
        self.expected_dim = expected_dim

    @classmethod
    def from_key(cls, key: str) -> "Backbone":
        for backbone in cls:
            if backbone.key == key.strip().lower():
                return backbone
        known = ", ".join(b.key for b in cls)
        raise ValueError(f"unknown backbone {key!r} (expected one of: {known})")

    @classmethod
    def from_wire_id(cls, wire_id: int) -> "Backbone":
        for backbone in cls:
            if backbone.wire_id == wire_id:
                return backbone
        raise ValueError(f"unknown backbone id {wire_id}")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row-major float32 features, one row per sample id, all values finite."""

    backbone: Backbone
    sample_ids: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise EmbeddingFormatError(f"values must be 2-D, got shape {values.shape}")
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        if values.shape[0] != len(self.sample_ids):
            raise EmbeddingFormatError(
                f"{values.shape[0]} rows but {len(self.sample_ids)} sample ids"
            )
        if values.shape[1] < 1:
            raise EmbeddingFormatError("feature dimension must be >= 1")
        expected = self.backbone.expected_dim
        if expected is not None and values.shape[1] != expected:
            raise EmbeddingFormatError(
                f"dim mismatch: {self.backbone.key} expects {expected}, got {values.shape[1]}"
            )
        if not np.isfinite(values).all():
            raise EmbeddingFormatError("matrix contains a non-finite value")
        seen: set[str] = set()
        for sample_id in self.sample_ids:
            if not sample_id:
                raise EmbeddingFormatError("empty sample id")
            if sample_id in seen:
                raise EmbeddingFormatError(f"duplicate sample id {sample_id!r}")
            seen.add(sample_id)
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.sample_ids)

    def row_index(self) -> dict[str, int]:
        return {sample_id: i for i, sample_id in enumerate(self.sample_ids)}


def write_embeddings(matrix: EmbeddingMatrix, destination) -> None:
    """Write the matrix in the binary format; byte-deterministic for equal inputs."""
    header = _HEADER.pack(
        MAGIC, FORMAT_VERSION, matrix.backbone.wire_id, matrix.dim, len(matrix)
    )
    parts = [header]
    for sample_id in matrix.sample_ids:
        encoded = sample_id.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise EmbeddingFormatError(f"sample id too long ({len(encoded)} bytes)")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
    parts.append(matrix.values.astype("<f4", copy=False).tobytes(order="C"))
    with open(destination, "wb") as handle:
        handle.write(b"".join(parts))


def read_embeddings(source) -> EmbeddingMatrix:
    """Read and validate an embedding file written by :func:`write_embeddings`."""
    with open(source, "rb") as handle:
        data = handle.read()

    if len(data) < _HEADER.size:
        raise EmbeddingFormatError("truncated header")
    magic, version, backbone_id, dim, row_count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise EmbeddingFormatError(f"unsupported format version {version}")
    try:
        backbone = Backbone.from_wire_id(backbone_id)
    except ValueError as exc:
        raise EmbeddingFormatError(str(exc)) from None

    offset = _HEADER.size
    sample_ids: list[str] = []
    for _ in range(row_count):
        if offset + 2 > len(data):
            raise EmbeddingFormatError("truncated id table")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len > len(data):
            raise EmbeddingFormatError("truncated id table")
        try:
            sample_ids.append(data[offset : offset + id_len].decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise EmbeddingFormatError(f"undecodable sample id: {exc}") from None
        offset += id_len

    payload_size = row_count * dim * 4
    if len(data) - offset < payload_size:
        raise EmbeddingFormatError(
            f"truncated payload: expected {payload_size} bytes, got {len(data) - offset}"
        )
    if len(data) - offset > payload_size:
        raise EmbeddingFormatError("trailing data after payload")
    values = np.frombuffer(data, dtype="<f4", count=row_count * dim, offset=offset)
    values = values.reshape(row_count, dim).copy()
    return EmbeddingMatrix(backbone=backbone, sample_ids=tuple(sample_ids), values=values)


def align(matrix: EmbeddingMatrix, manifest: DatasetManifest) -> EmbeddingMatrix:
    """Reorder rows to manifest order; every manifest id must be present."""
    index = matrix.row_index()
    missing = [sid for sid in manifest.sample_ids if sid not in index]
    if missing:
        raise AlignmentError(missing)
    rows = [index[sid] for sid in manifest.sample_ids]
    return EmbeddingMatrix(
        backbone=matrix.backbone,
        sample_ids=manifest.sample_ids,
        values=matrix.values[rows],
    )
