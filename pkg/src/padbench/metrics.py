"""ISO/IEC 30107-3 style PAD error rates over labeled decision scores.

Conventions, fixed so that brute-force oracles are exact:

- classification rule: bona fide iff score >= threshold;
- APCER(t) = 100 * #(attack scores >= t) / #attacks,
  BPCER(t) = 100 * #(bona fide scores < t) / #bona fide;
- the DET threshold grid is the midpoints between consecutive distinct
  pooled scores plus one sentinel below the minimum and one above the
  maximum, which visits every achievable (APCER, BPCER) pair;
- D-EER picks the grid point minimizing |APCER - BPCER| (ties: lowest
  threshold) and reports the mean of the two rates there;
- percentages stay full-precision floats and are rounded only when rendered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricsError
from .svm import ScoreSet


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    apcer: float
    bpcer: float


@dataclass(frozen=True)
class DetCurve:
    """Operating points by ascending threshold; APCER falls, BPCER rises."""

    points: tuple[OperatingPoint, ...]

    def thresholds(self) -> np.ndarray:
        return np.array([p.threshold for p in self.points])


@dataclass(frozen=True)
class CaseMetrics:
    """Headline metrics of one case x backbone evaluation.

    ``det`` may be None for summary-only reports rebuilt from rendered data.
    """

    case_id: int
    backbone_key: str
    d_eer: float
    eer_threshold: float
    bpcer_at_apcer5: float
    bpcer_at_apcer10: float
    det: DetCurve | None


def _class_scores(scores: ScoreSet) -> tuple[np.ndarray, np.ndarray]:
    bona = scores.bona_fide_scores()
    attack = scores.attack_scores()
    if bona.size == 0:
        raise MetricsError("score set contains no bona fide samples")
    if attack.size == 0:
        raise MetricsError("score set contains no attack samples")
    return bona, attack


def apcer_bpcer(scores: ScoreSet, threshold: float) -> tuple[float, float]:
    """Error-rate pair (in percent) at one decision threshold."""
    bona, attack = _class_scores(scores)
    apcer = 100.0 * np.count_nonzero(attack >= threshold) / attack.size
    bpcer = 100.0 * np.count_nonzero(bona < threshold) / bona.size
    return float(apcer), float(bpcer)


def _threshold_grid(bona: np.ndarray, attack: np.ndarray) -> np.ndarray:
    distinct = np.unique(np.concatenate([bona, attack]))
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate([[distinct[0] - 1.0], mids, [distinct[-1] + 1.0]])


def _sweep(bona: np.ndarray, attack: np.ndarray, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bona_sorted = np.sort(bona)
    attack_sorted = np.sort(attack)
    # count >= t via n - #(< t); grid points never coincide with scores.
    apcer = 100.0 * (attack.size - np.searchsorted(attack_sorted, grid, side="left")) / attack.size
    bpcer = 100.0 * np.searchsorted(bona_sorted, grid, side="left") / bona.size
    return apcer, bpcer


def det_curve(scores: ScoreSet) -> DetCurve:
    """Full DET staircase over the midpoint threshold grid."""
    bona, attack = _class_scores(scores)
    grid = _threshold_grid(bona, attack)
    apcer, bpcer = _sweep(bona, attack, grid)
    points = tuple(
        OperatingPoint(threshold=float(t), apcer=float(a), bpcer=float(b))
        for t, a, b in zip(grid, apcer, bpcer)
    )
    return DetCurve(points=points)


def d_eer(scores: ScoreSet) -> tuple[float, float]:
    """Detection equal error rate and its threshold."""
    bona, attack = _class_scores(scores)
    grid = _threshold_grid(bona, attack)
    apcer, bpcer = _sweep(bona, attack, grid)
    idx = int(np.argmin(np.abs(apcer - bpcer)))  # first minimum = lowest threshold
    return float((apcer[idx] + bpcer[idx]) / 2.0), float(grid[idx])


def bpcer_at_apcer(scores: ScoreSet, target: float) -> float:
    """Lowest BPCER among grid points with APCER <= target; 100 if unreachable."""
    if not 0.0 < target < 100.0:
        raise MetricsError(f"APCER target must be in (0, 100), got {target}")
    bona, attack = _class_scores(scores)
    grid = _threshold_grid(bona, attack)
    apcer, bpcer = _sweep(bona, attack, grid)
    feasible = bpcer[apcer <= target]
    if feasible.size == 0:
        return 100.0
    return float(feasible.min())


def average_deer(values) -> float:
    """Arithmetic mean of per-case D-EER values."""
    values = list(values)
    if not values:
        raise MetricsError("cannot average an empty list of D-EER values")
    return float(np.mean(values))


def compute_case_metrics(scores: ScoreSet, case_id: int, backbone_key: str) -> CaseMetrics:
    eer, threshold = d_eer(scores)
    return CaseMetrics(
        case_id=case_id,
        backbone_key=backbone_key,
        d_eer=eer,
        eer_threshold=threshold,
        bpcer_at_apcer5=bpcer_at_apcer(scores, 5.0),
        bpcer_at_apcer10=bpcer_at_apcer(scores, 10.0),
        det=det_curve(scores),
    )
