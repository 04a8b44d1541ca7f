"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class HealthResponse(BaseModel):
    status: str
    version: str


class CaseInfo(BaseModel):
    case_id: int
    train_species: list[str]
    test_species: str


class CasesResponse(BaseModel):
    cases: list[CaseInfo]


class ManifestSummaryRequest(BaseModel):
    manifest_csv: str


class ManifestSummaryResponse(BaseModel):
    total: int
    bona_fide: int
    attack_total: int
    species: dict[str, int]


class ScoreEntryModel(BaseModel):
    sample_id: str
    label: Literal["bona_fide", "attack"]
    species: str | None = None
    score: float

    @model_validator(mode="after")
    def _species_matches_label(self):
        if self.label == "attack" and not self.species:
            raise ValueError("attack entries must carry a species")
        if self.label == "bona_fide" and self.species:
            raise ValueError("bona fide entries must not carry a species")
        return self


class MetricsRequest(BaseModel):
    entries: list[ScoreEntryModel]
    apcer_targets: list[float] = Field(default=[5.0, 10.0])
    include_det: bool = False


class OperatingPointModel(BaseModel):
    threshold: float
    apcer: float
    bpcer: float


class BpcerAtTarget(BaseModel):
    target: float
    bpcer: float


class MetricsResponse(BaseModel):
    n_bona_fide: int
    n_attack: int
    d_eer: float
    eer_threshold: float
    bpcer_at: list[BpcerAtTarget]
    det: list[OperatingPointModel] | None = None


class BenchmarkRequest(BaseModel):
    """Paths are resolved on the machine running the service."""

    manifest_path: str
    embeddings_dir: str
    backbones: list[str] | None = None
    svm_c: float = Field(default=1.0, gt=0)
    svm_tol: float = Field(default=1e-4, gt=0)
    svm_max_iter: int = Field(default=1000, ge=1)
    bonafide_ratio: float = Field(default=0.5, gt=0, lt=1)
    seed: int = 42
    standardize: bool = True
    out_dir: str | None = None
    write_outputs: bool = True


class ReportMetadataModel(BaseModel):
    seed: int
    bonafide_ratio: float
    svm_c: float
    svm_tol: float
    svm_max_iter: int
    standardize: bool
    backbones: list[str]
    manifest_sha256: str
    embeddings_sha256: dict[str, str]
    version: str


class ReportEntryModel(BaseModel):
    case_id: int
    backbone: str
    d_eer: float
    eer_threshold: float
    bpcer_at_5: float
    bpcer_at_10: float
    det: list[tuple[float, float, float]] | None = None


class ReportModel(BaseModel):
    metadata: ReportMetadataModel
    entries: list[ReportEntryModel]
    averages: dict[str, float]


class BenchmarkResponse(BaseModel):
    report: ReportModel
    out_dir: str | None


class TableRequest(BaseModel):
    report: ReportModel


class TableResponse(BaseModel):
    table: str
