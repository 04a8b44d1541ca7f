"""From-scratch linear SVM used as the bona fide vs. attack comparator.

Training minimizes the L1-hinge primal

    f(w, b) = 0.5 * (||w||^2 + b^2) + C * sum_i max(0, 1 - y_i * (w.x_i + b))

by coordinate descent on its dual. The bias is handled by augmenting every
sample with a constant feature 1.0, so it is regularized together with the
weights and the dual has box constraints only (0 <= alpha_i <= C). One pass
visits every coordinate in a seeded random permutation; training stops when
the largest projected-gradient violation seen during a pass drops to ``tol``
or ``max_iter`` passes elapse.

Score polarity is fixed at training time: bona fide samples are mapped to
y=+1, so larger decision scores mean "more bona fide".
"""

from __future__ import annotations

import struct
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import SvmError
from .manifest import PresentationLabel

STD_EPSILON = 1e-12

_MODEL_MAGIC = b"PDSV"
_MODEL_VERSION = 1


@dataclass(frozen=True)
class ScalerStats:
    """Per-column mean and population standard deviation (clamped at epsilon)."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.shape != std.shape or mean.ndim != 1:
            raise SvmError(f"scaler shape mismatch: mean {mean.shape}, std {std.shape}")
        if (std < STD_EPSILON).any():
            raise SvmError(f"scaler std below epsilon {STD_EPSILON}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise SvmError(f"expected shape (n, {self.dim}), got {x.shape}")
        return (x - self.mean) / self.std

    @classmethod
    def identity(cls, dim: int) -> "ScalerStats":
        return cls(mean=np.zeros(dim), std=np.ones(dim))


def standardize_fit(x: np.ndarray) -> ScalerStats:
    """Fit per-column mean/std on the training matrix; needs at least 2 rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise SvmError(f"standardization needs a 2-D matrix with >= 2 rows, got {x.shape}")
    mean = x.mean(axis=0)
    std = x.std(axis=0)  # population std (ddof=0)
    return ScalerStats(mean=mean, std=np.maximum(std, STD_EPSILON))


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    tol: float = 1e-4
    max_iter: int = 1000
    seed: int = 42

    def __post_init__(self):
        if not self.c > 0:
            raise SvmError(f"c must be positive, got {self.c}")
        if not self.tol > 0:
            raise SvmError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise SvmError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class TrainedModel:
    """Linear decision function w.x + b in standardized feature space."""

    weights: np.ndarray
    bias: float
    scaler: ScalerStats
    config: SvmConfig
    iterations_used: int
    converged: bool

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 1 or not np.isfinite(weights).all():
            raise SvmError("model weights must be a finite 1-D vector")
        if weights.shape[0] != self.scaler.dim:
            raise SvmError(
                f"weight dim {weights.shape[0]} does not match scaler dim {self.scaler.dim}"
            )
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class ScoreEntry:
    sample_id: str
    label: PresentationLabel
    score: float


@dataclass(frozen=True)
class ScoreSet:
    """Labeled decision scores; higher score means more bona fide."""

    entries: tuple[ScoreEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def bona_fide_scores(self) -> np.ndarray:
        return np.array([e.score for e in self.entries if e.label.is_bona_fide], dtype=np.float64)

    def attack_scores(self) -> np.ndarray:
        return np.array([e.score for e in self.entries if e.label.is_attack], dtype=np.float64)


PassCallback = Callable[[int, np.ndarray, float], None]


def train_linear_svm(
    x: np.ndarray,
    y: np.ndarray,
    cfg: SvmConfig,
    scaler: ScalerStats | None = None,
    callback: PassCallback | None = None,
) -> TrainedModel:
    """Train on an (already standardized) matrix with labels in {+1, -1}.

    ``scaler`` is stored on the returned model so raw features can be scored
    later; when None an identity scaler is attached. ``callback``, if given,
    receives ``(pass_index, alpha_copy, violation)`` after every pass.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2:
        raise SvmError(f"training matrix must be 2-D, got shape {x.shape}")
    n, dim = x.shape
    if y.shape != (n,):
        raise SvmError(f"got {n} rows but {y.shape} labels")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise SvmError("labels must be +1 (bona fide) or -1 (attack)")
    if (y > 0).all() or (y < 0).all():
        raise SvmError("training data contains a single class")
    if scaler is None:
        scaler = ScalerStats.identity(dim)
    elif scaler.dim != dim:
        raise SvmError(f"scaler dim {scaler.dim} does not match data dim {dim}")

    c = cfg.c
    # Diagonal of the dual Hessian; the +1 is the augmented bias feature.
    qii = np.einsum("ij,ij->i", x, x) + 1.0
    alpha = np.zeros(n)
    w = np.zeros(dim)
    b = 0.0
    rng = np.random.default_rng(cfg.seed)

    converged = False
    passes = 0
    for pass_index in range(cfg.max_iter):
        violation = 0.0
        for i in rng.permutation(n):
            yi = y[i]
            xi = x[i]
            g = yi * (xi @ w + b) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= c:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg != 0.0:
                violation = max(violation, abs(pg))
                a_new = min(max(a - g / qii[i], 0.0), c)
                delta = a_new - a
                if delta != 0.0:
                    alpha[i] = a_new
                    step = delta * yi
                    w += step * xi
                    b += step
        passes = pass_index + 1
        if callback is not None:
            callback(pass_index, alpha.copy(), violation)
        if violation <= cfg.tol:
            converged = True
            break

    return TrainedModel(
        weights=w,
        bias=b,
        scaler=scaler,
        config=cfg,
        iterations_used=passes,
        converged=converged,
    )


def decision_scores(
    model: TrainedModel,
    x_raw: np.ndarray,
    ids: Sequence[str],
    labels: Sequence[PresentationLabel],
) -> ScoreSet:
    """Apply the stored scaler to raw features and score w.x + b per row."""
    x_raw = np.asarray(x_raw, dtype=np.float64)
    if x_raw.ndim != 2 or x_raw.shape[1] != model.dim:
        raise SvmError(f"expected shape (n, {model.dim}), got {x_raw.shape}")
    if len(ids) != x_raw.shape[0] or len(labels) != x_raw.shape[0]:
        raise SvmError("ids/labels length does not match the number of rows")
    scores = model.scaler.apply(x_raw) @ model.weights + model.bias
    entries = tuple(
        ScoreEntry(sample_id=sid, label=label, score=float(score))
        for sid, label, score in zip(ids, labels, scores)
    )
    return ScoreSet(entries=entries)


def primal_objective(x: np.ndarray, y: np.ndarray, model: TrainedModel, c: float) -> float:
    """Regularized hinge objective of the model on (x, y); bias is regularized."""
    margins = y * (x @ model.weights + model.bias)
    hinge = np.maximum(0.0, 1.0 - margins).sum()
    reg = 0.5 * (model.weights @ model.weights + model.bias * model.bias)
    return float(reg + c * hinge)


def save_model(model: TrainedModel, destination) -> None:
    """Persist a model so evaluation can rerun without retraining."""
    dim = model.dim
    header = struct.pack("<4sHI", _MODEL_MAGIC, _MODEL_VERSION, dim)
    cfg = model.config
    body = b"".join(
        [
            model.weights.astype("<f8").tobytes(),
            struct.pack("<d", model.bias),
            model.scaler.mean.astype("<f8").tobytes(),
            model.scaler.std.astype("<f8").tobytes(),
            struct.pack("<ddIqIB", cfg.c, cfg.tol, cfg.max_iter, cfg.seed,
                        model.iterations_used, int(model.converged)),
        ]
    )
    with open(destination, "wb") as handle:
        handle.write(header + body)


def load_model(source) -> TrainedModel:
    with open(source, "rb") as handle:
        data = handle.read()
    magic, version, dim = struct.unpack_from("<4sHI", data, 0)
    if magic != _MODEL_MAGIC:
        raise SvmError(f"bad model magic {magic!r}")
    if version != _MODEL_VERSION:
        raise SvmError(f"unsupported model version {version}")
    offset = struct.calcsize("<4sHI")
    weights = np.frombuffer(data, dtype="<f8", count=dim, offset=offset).copy()
    offset += dim * 8
    (bias,) = struct.unpack_from("<d", data, offset)
    offset += 8
    mean = np.frombuffer(data, dtype="<f8", count=dim, offset=offset).copy()
    offset += dim * 8
    std = np.frombuffer(data, dtype="<f8", count=dim, offset=offset).copy()
    offset += dim * 8
    c, tol, max_iter, seed, iterations_used, converged = struct.unpack_from(
        "<ddIqIB", data, offset
    )
    return TrainedModel(
        weights=weights,
        bias=bias,
        scaler=ScalerStats(mean=mean, std=std),
        config=SvmConfig(c=c, tol=tol, max_iter=max_iter, seed=seed),
        iterations_used=iterations_used,
        converged=bool(converged),
    )
