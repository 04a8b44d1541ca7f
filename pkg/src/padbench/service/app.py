"""FastAPI service exposing the benchmark harness.

The CLI is a thin client of these endpoints; they can also be served with
uvicorn for remote use, in which case benchmark paths refer to the server's
filesystem.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .._version import __version__
from ..embeddings import Backbone
from ..errors import PadbenchError
from ..manifest import BONA_FIDE, PaiSpecies, PresentationLabel, parse_manifest
from ..metrics import bpcer_at_apcer, d_eer, det_curve
from ..protocol import build_cases
from ..report import (
    RunConfig,
    render_table,
    report_from_dict,
    report_to_dict,
    run_benchmark,
    write_run_outputs,
)
from ..svm import ScoreEntry, ScoreSet
from . import schemas


def _score_set(entries: list[schemas.ScoreEntryModel]) -> ScoreSet:
    converted = []
    for entry in entries:
        if entry.label == "bona_fide":
            label = BONA_FIDE
        else:
            label = PresentationLabel.attack(PaiSpecies.parse(entry.species))
        converted.append(ScoreEntry(sample_id=entry.sample_id, label=label, score=entry.score))
    return ScoreSet(entries=tuple(converted))


def _default_out_dir() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    return str(Path("runs") / stamp)


def create_app() -> FastAPI:
    app = FastAPI(title="padbench", version=__version__)

    @app.exception_handler(PadbenchError)
    async def _domain_error(request: Request, exc: PadbenchError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/cases", response_model=schemas.CasesResponse)
    def cases() -> schemas.CasesResponse:
        infos = [
            schemas.CaseInfo(
                case_id=case.case_id,
                train_species=sorted(s.value for s in case.train_species),
                test_species=case.test_species.value,
            )
            for case in build_cases()
        ]
        return schemas.CasesResponse(cases=infos)

    @app.post("/manifest/summary", response_model=schemas.ManifestSummaryResponse)
    def manifest_summary(request: schemas.ManifestSummaryRequest) -> schemas.ManifestSummaryResponse:
        summary = parse_manifest(request.manifest_csv).summarize()
        return schemas.ManifestSummaryResponse(
            total=summary.total,
            bona_fide=summary.bona_fide,
            attack_total=summary.attack_total,
            species={species.value: count for species, count in summary.species.items()},
        )

    @app.post("/metrics", response_model=schemas.MetricsResponse)
    def metrics(request: schemas.MetricsRequest) -> schemas.MetricsResponse:
        scores = _score_set(request.entries)
        eer, threshold = d_eer(scores)
        bpcer_points = [
            schemas.BpcerAtTarget(target=target, bpcer=bpcer_at_apcer(scores, target))
            for target in request.apcer_targets
        ]
        det = None
        if request.include_det:
            det = [
                schemas.OperatingPointModel(threshold=p.threshold, apcer=p.apcer, bpcer=p.bpcer)
                for p in det_curve(scores).points
            ]
        return schemas.MetricsResponse(
            n_bona_fide=int(scores.bona_fide_scores().size),
            n_attack=int(scores.attack_scores().size),
            d_eer=eer,
            eer_threshold=threshold,
            bpcer_at=bpcer_points,
            det=det,
        )

    @app.post("/benchmark", response_model=schemas.BenchmarkResponse)
    def benchmark(request: schemas.BenchmarkRequest) -> schemas.BenchmarkResponse:
        backbones = tuple(Backbone)
        if request.backbones is not None:
            backbones = tuple(Backbone.from_key(key) for key in request.backbones)
        config = RunConfig(
            backbones=backbones,
            svm_c=request.svm_c,
            svm_tol=request.svm_tol,
            svm_max_iter=request.svm_max_iter,
            bonafide_ratio=request.bonafide_ratio,
            seed=request.seed,
            standardize=request.standardize,
        )
        report, runs = run_benchmark(request.manifest_path, request.embeddings_dir, config)
        out_dir = None
        if request.write_outputs:
            out_dir = request.out_dir or _default_out_dir()
            write_run_outputs(report, runs, out_dir)
        return schemas.BenchmarkResponse(
            report=schemas.ReportModel.model_validate(report_to_dict(report)),
            out_dir=out_dir,
        )

    @app.post("/report/table", response_model=schemas.TableResponse)
    def table(request: schemas.TableRequest) -> schemas.TableResponse:
        report = report_from_dict(request.report.model_dump())
        return schemas.TableResponse(table=render_table(report))

    return app


app = create_app()
