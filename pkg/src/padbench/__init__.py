"""Leave-one-out PAD benchmark harness for fingerphoto deep-feature embeddings."""

from ._version import __version__
from .embeddings import Backbone, EmbeddingMatrix, align, read_embeddings, write_embeddings
from .errors import (
    AlignmentError,
    EmbeddingFormatError,
    ManifestError,
    MetricsError,
    PadbenchError,
    ProtocolError,
    ReportError,
    SvmError,
)
from .manifest import (
    BONA_FIDE,
    CaptureDevice,
    DatasetManifest,
    PaiSpecies,
    PresentationLabel,
    SampleRecord,
    load_manifest,
    parse_manifest,
)
from .metrics import (
    CaseMetrics,
    DetCurve,
    OperatingPoint,
    apcer_bpcer,
    average_deer,
    bpcer_at_apcer,
    compute_case_metrics,
    d_eer,
    det_curve,
)
from .protocol import (
    BonafideSplit,
    CaseDefinition,
    CaseRun,
    build_cases,
    run_case,
    split_bonafide,
)
from .report import BenchmarkReport, RunConfig, render_table, run_benchmark, write_run_outputs
from .svm import (
    ScalerStats,
    ScoreEntry,
    ScoreSet,
    SvmConfig,
    TrainedModel,
    decision_scores,
    load_model,
    save_model,
    standardize_fit,
    train_linear_svm,
)

__all__ = [
    "__version__",
    "AlignmentError",
    "Backbone",
    "BenchmarkReport",
    "BonafideSplit",
    "BONA_FIDE",
    "CaptureDevice",
    "CaseDefinition",
    "CaseMetrics",
    "CaseRun",
    "DatasetManifest",
    "DetCurve",
    "EmbeddingFormatError",
    "EmbeddingMatrix",
    "ManifestError",
    "MetricsError",
    "OperatingPoint",
    "PadbenchError",
    "PaiSpecies",
    "PresentationLabel",
    "ProtocolError",
    "ReportError",
    "RunConfig",
    "SampleRecord",
    "ScalerStats",
    "ScoreEntry",
    "ScoreSet",
    "SvmConfig",
    "SvmError",
    "TrainedModel",
    "align",
    "apcer_bpcer",
    "average_deer",
    "bpcer_at_apcer",
    "build_cases",
    "compute_case_metrics",
    "d_eer",
    "decision_scores",
    "det_curve",
    "load_manifest",
    "load_model",
    "parse_manifest",
    "read_embeddings",
    "render_table",
    "run_benchmark",
    "run_case",
    "save_model",
    "split_bonafide",
    "standardize_fit",
    "train_linear_svm",
    "write_embeddings",
    "write_run_outputs",
]
