"""Benchmark orchestration, report data model, rendering and file output.

A full run produces, under one output directory::

    report.json                      # everything, replayable metadata included
    summary.csv                      # backbone,case,d_eer,bpcer_at_5,bpcer_at_10
    boxplot.csv                      # per-backbone case D-EERs plus their mean
    table.txt                        # rendered results table
    <backbone>/case<k>/scores.csv    # sample_id,label,species,score
    <backbone>/case<k>/det.csv       # threshold,apcer,bpcer
    <backbone>/case<k>/model.pdsv    # trained comparator

Files are written atomically (temp file + rename) so partially finished runs
never leave a corrupt report behind.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ._version import __version__
from .embeddings import Backbone, read_embeddings
from .errors import ReportError
from .manifest import BONA_FIDE, PaiSpecies, PresentationLabel, load_manifest
from .metrics import CaseMetrics, DetCurve, OperatingPoint, compute_case_metrics
from .protocol import CaseRun, build_cases, run_case, split_bonafide
from .svm import ScoreEntry, ScoreSet, SvmConfig, save_model

# Rendering order of the result rows within each case.
DISPLAY_ORDER = (
    Backbone.ALEXNET,
    Backbone.GOOGLENET,
    Backbone.DENSENET201,
    Backbone.RESNET50,
    Backbone.EFFICIENTNET_B0,
    Backbone.NASNET,
    Backbone.MOBILENET_V2,
    Backbone.VIT,
)


def embedding_file_name(backbone: Backbone) -> str:
    return f"{backbone.key}.pdbe"


@dataclass(frozen=True)
class RunConfig:
    backbones: tuple[Backbone, ...] = tuple(Backbone)
    svm_c: float = 1.0
    svm_tol: float = 1e-4
    svm_max_iter: int = 1000
    bonafide_ratio: float = 0.5
    seed: int = 42
    standardize: bool = True

    def svm_config(self) -> SvmConfig:
        return SvmConfig(c=self.svm_c, tol=self.svm_tol, max_iter=self.svm_max_iter,
                         seed=self.seed)


@dataclass(frozen=True)
class RunMetadata:
    """Everything needed to reproduce the run, given the same input files."""

    seed: int
    bonafide_ratio: float
    svm_c: float
    svm_tol: float
    svm_max_iter: int
    standardize: bool
    backbones: tuple[str, ...]
    manifest_sha256: str
    embeddings_sha256: dict[str, str]
    version: str

    def run_config(self) -> RunConfig:
        return RunConfig(
            backbones=tuple(Backbone.from_key(k) for k in self.backbones),
            svm_c=self.svm_c,
            svm_tol=self.svm_tol,
            svm_max_iter=self.svm_max_iter,
            bonafide_ratio=self.bonafide_ratio,
            seed=self.seed,
            standardize=self.standardize,
        )


@dataclass(frozen=True)
class BenchmarkReport:
    metadata: RunMetadata
    entries: tuple[CaseMetrics, ...]
    averages: dict[str, float]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def run_benchmark(manifest_path, embeddings_dir, config: RunConfig) -> tuple[BenchmarkReport, list[CaseRun]]:
    """Run every requested backbone through all four cases, deterministically."""
    manifest_path = Path(manifest_path)
    embeddings_dir = Path(embeddings_dir)
    if not manifest_path.is_file():
        raise ReportError(f"manifest not found: {manifest_path}")
    manifest = load_manifest(manifest_path)

    embedding_paths: dict[Backbone, Path] = {}
    for backbone in config.backbones:
        path = embeddings_dir / embedding_file_name(backbone)
        if not path.is_file():
            raise ReportError(f"missing embedding file for {backbone.key}: {path}")
        embedding_paths[backbone] = path

    split = split_bonafide(manifest, config.bonafide_ratio, config.seed)
    svm_cfg = config.svm_config()
    cases = build_cases()

    runs: list[CaseRun] = []
    entries: list[CaseMetrics] = []
    for backbone in config.backbones:
        embeddings = read_embeddings(embedding_paths[backbone])
        for case in cases:
            case_run = run_case(case, manifest, embeddings, split, svm_cfg,
                                standardize=config.standardize)
            runs.append(case_run)
            entries.append(compute_case_metrics(case_run.scores, case.case_id, backbone.key))

    averages = {
        backbone.key: sum(e.d_eer for e in entries if e.backbone_key == backbone.key) / len(cases)
        for backbone in config.backbones
    }
    metadata = RunMetadata(
        seed=config.seed,
        bonafide_ratio=config.bonafide_ratio,
        svm_c=config.svm_c,
        svm_tol=config.svm_tol,
        svm_max_iter=config.svm_max_iter,
        standardize=config.standardize,
        backbones=tuple(b.key for b in config.backbones),
        manifest_sha256=_sha256(manifest_path),
        embeddings_sha256={b.key: _sha256(p) for b, p in embedding_paths.items()},
        version=__version__,
    )
    return BenchmarkReport(metadata=metadata, entries=tuple(entries), averages=averages), runs


# ---------------------------------------------------------------------------
# CSV / JSON serialization


def scores_csv(scores: ScoreSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", "label", "species", "score"])
    for entry in scores.entries:
        label = "bona_fide" if entry.label.is_bona_fide else "attack"
        species = "" if entry.label.is_bona_fide else entry.label.species.value
        writer.writerow([entry.sample_id, label, species, repr(entry.score)])
    return buf.getvalue()


def parse_scores_csv(text: str) -> ScoreSet:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ReportError("empty scores document") from None
    if tuple(h.strip() for h in header) != ("sample_id", "label", "species", "score"):
        raise ReportError(f"bad scores header: {','.join(header)!r}")
    entries = []
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise ReportError(f"bad scores row: {row!r}")
        sample_id, label_token, species_token, score = row
        if label_token == "bona_fide":
            label = BONA_FIDE
        elif label_token == "attack":
            label = PresentationLabel.attack(PaiSpecies.parse(species_token))
        else:
            raise ReportError(f"unknown label {label_token!r} in scores file")
        entries.append(ScoreEntry(sample_id=sample_id, label=label, score=float(score)))
    return ScoreSet(entries=tuple(entries))


def det_csv(det: DetCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "apcer", "bpcer"])
    for point in det.points:
        writer.writerow([repr(point.threshold), repr(point.apcer), repr(point.bpcer)])
    return buf.getvalue()


def summary_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["backbone", "case", "d_eer", "bpcer_at_5", "bpcer_at_10"])
    for entry in _display_sorted(report.entries):
        writer.writerow(
            [
                entry.backbone_key,
                entry.case_id,
                repr(entry.d_eer),
                repr(entry.bpcer_at_apcer5),
                repr(entry.bpcer_at_apcer10),
            ]
        )
    return buf.getvalue()


def boxplot_csv(report: BenchmarkReport) -> str:
    """One row per backbone: the per-case D-EER values and their mean."""
    case_ids = sorted({e.case_id for e in report.entries})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["backbone"] + [f"case{k}" for k in case_ids] + ["mean"])
    for backbone in DISPLAY_ORDER:
        rows = {e.case_id: e for e in report.entries if e.backbone_key == backbone.key}
        if not rows:
            continue
        values = [rows[k].d_eer for k in case_ids if k in rows]
        writer.writerow(
            [backbone.key]
            + [repr(rows[k].d_eer) if k in rows else "" for k in case_ids]
            + [repr(sum(values) / len(values))]
        )
    return buf.getvalue()


def _display_sorted(entries) -> list[CaseMetrics]:
    order = {b.key: i for i, b in enumerate(DISPLAY_ORDER)}
    return sorted(entries, key=lambda e: (e.case_id, order.get(e.backbone_key, len(order))))


def render_table(report: BenchmarkReport) -> str:
    """Fixed-width results table, two decimals, one row per backbone per case."""
    display = {b.key: b.display_name for b in Backbone}
    header = f"{'Case':<8}{'PAD Algorithm':<18}{'D-EER':>8}{'BPCER@APCER=5%':>17}{'BPCER@APCER=10%':>18}"
    lines = [header, "-" * len(header)]
    for entry in _display_sorted(report.entries):
        lines.append(
            f"{f'Case-{entry.case_id}':<8}"
            f"{display.get(entry.backbone_key, entry.backbone_key):<18}"
            f"{entry.d_eer:>8.2f}"
            f"{entry.bpcer_at_apcer5:>17.2f}"
            f"{entry.bpcer_at_apcer10:>18.2f}"
        )
    if report.averages:
        lines.append("-" * len(header))
        order = {b.key: i for i, b in enumerate(DISPLAY_ORDER)}
        averaged = sorted(report.averages.items(), key=lambda kv: order.get(kv[0], len(order)))
        lines.append(
            "Average D-EER: "
            + ", ".join(f"{display.get(k, k)}={v:.2f}" for k, v in averaged)
        )
    return "\n".join(lines) + "\n"


def report_to_dict(report: BenchmarkReport) -> dict:
    return {
        "metadata": {
            "seed": report.metadata.seed,
            "bonafide_ratio": report.metadata.bonafide_ratio,
            "svm_c": report.metadata.svm_c,
            "svm_tol": report.metadata.svm_tol,
            "svm_max_iter": report.metadata.svm_max_iter,
            "standardize": report.metadata.standardize,
            "backbones": list(report.metadata.backbones),
            "manifest_sha256": report.metadata.manifest_sha256,
            "embeddings_sha256": dict(report.metadata.embeddings_sha256),
            "version": report.metadata.version,
        },
        "entries": [
            {
                "case_id": e.case_id,
                "backbone": e.backbone_key,
                "d_eer": e.d_eer,
                "eer_threshold": e.eer_threshold,
                "bpcer_at_5": e.bpcer_at_apcer5,
                "bpcer_at_10": e.bpcer_at_apcer10,
                "det": None
                if e.det is None
                else [[p.threshold, p.apcer, p.bpcer] for p in e.det.points],
            }
            for e in report.entries
        ],
        "averages": dict(report.averages),
    }


def report_from_dict(data: dict) -> BenchmarkReport:
    try:
        meta = data["metadata"]
        metadata = RunMetadata(
            seed=meta["seed"],
            bonafide_ratio=meta["bonafide_ratio"],
            svm_c=meta["svm_c"],
            svm_tol=meta["svm_tol"],
            svm_max_iter=meta["svm_max_iter"],
            standardize=meta["standardize"],
            backbones=tuple(meta["backbones"]),
            manifest_sha256=meta["manifest_sha256"],
            embeddings_sha256=dict(meta["embeddings_sha256"]),
            version=meta["version"],
        )
        entries = []
        for item in data["entries"]:
            det = item.get("det")
            entries.append(
                CaseMetrics(
                    case_id=item["case_id"],
                    backbone_key=item["backbone"],
                    d_eer=item["d_eer"],
                    eer_threshold=item["eer_threshold"],
                    bpcer_at_apcer5=item["bpcer_at_5"],
                    bpcer_at_apcer10=item["bpcer_at_10"],
                    det=None
                    if det is None
                    else DetCurve(
                        points=tuple(OperatingPoint(t, a, b) for t, a, b in det)
                    ),
                )
            )
        return BenchmarkReport(
            metadata=metadata, entries=tuple(entries), averages=dict(data["averages"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportError(f"malformed report document: {exc}") from None


def report_json(report: BenchmarkReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# File output


def atomic_write(path: Path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_run_outputs(report: BenchmarkReport, runs: list[CaseRun], out_dir) -> None:
    out_dir = Path(out_dir)
    metrics_by_run = {(e.backbone_key, e.case_id): e for e in report.entries}
    for case_run in runs:
        case_dir = out_dir / case_run.backbone.key / f"case{case_run.case.case_id}"
        case_dir.mkdir(parents=True, exist_ok=True)
        atomic_write(case_dir / "scores.csv", scores_csv(case_run.scores))
        entry = metrics_by_run[(case_run.backbone.key, case_run.case.case_id)]
        if entry.det is not None:
            atomic_write(case_dir / "det.csv", det_csv(entry.det))
        save_model(case_run.model, case_dir / "model.pdsv")
    atomic_write(out_dir / "report.json", report_json(report))
    atomic_write(out_dir / "summary.csv", summary_csv(report))
    atomic_write(out_dir / "boxplot.csv", boxplot_csv(report))
    atomic_write(out_dir / "table.txt", render_table(report))
