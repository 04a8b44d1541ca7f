"""Leave-one-out-PAI protocol: case definitions, bona fide split, case runs.

Three attack materials train the classifier, the held-out fourth is scored,
giving four cases. Bona fide samples are divided once per invocation by a
seeded shuffle and the same split is reused by every case and backbone so
comparisons share their test sets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .embeddings import Backbone, EmbeddingMatrix, align
from .errors import ProtocolError
from .manifest import DatasetManifest, PaiSpecies, SampleRecord
from .svm import (
    ScalerStats,
    ScoreSet,
    SvmConfig,
    TrainedModel,
    decision_scores,
    standardize_fit,
    train_linear_svm,
)

logger = logging.getLogger(__name__)

# Held-out (test) species of cases 1..4.
_CASE_TEST_SPECIES = (
    PaiSpecies.ECOFLEX,
    PaiSpecies.PHOTO_PAPER,
    PaiSpecies.PLAYDOH,
    PaiSpecies.WOODGLUE,
)


@dataclass(frozen=True)
class CaseDefinition:
    case_id: int
    train_species: frozenset[PaiSpecies]
    test_species: PaiSpecies

    def __post_init__(self):
        if self.test_species in self.train_species:
            raise ProtocolError(f"case {self.case_id}: test species also in train set")
        if self.train_species | {self.test_species} != set(PaiSpecies):
            raise ProtocolError(f"case {self.case_id}: species do not cover all four PAIs")


def build_cases() -> tuple[CaseDefinition, ...]:
    """The four leave-one-out cases, in order: each species held out exactly once."""
    cases = []
    for k, test_species in enumerate(_CASE_TEST_SPECIES, start=1):
        train = frozenset(s for s in PaiSpecies if s is not test_species)
        cases.append(CaseDefinition(case_id=k, train_species=train, test_species=test_species))
    return tuple(cases)


@dataclass(frozen=True)
class BonafideSplit:
    train_ids: frozenset[str]
    test_ids: frozenset[str]
    ratio: float
    seed: int


def split_bonafide(manifest: DatasetManifest, ratio: float, seed: int) -> BonafideSplit:
    """Seeded shuffle of the bona fide ids, then a prefix split.

    The train side gets floor(ratio * n) ids. Same (manifest, ratio, seed)
    always yields the same split.
    """
    if not 0.0 < ratio < 1.0:
        raise ProtocolError(f"split ratio must be in (0, 1), got {ratio}")
    bona_ids = manifest.bona_fide_ids()
    n = len(bona_ids)
    if n < 2:
        raise ProtocolError(f"need at least 2 bona fide samples to split, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    shuffled = [bona_ids[i] for i in perm]
    n_train = math.floor(ratio * n)
    return BonafideSplit(
        train_ids=frozenset(shuffled[:n_train]),
        test_ids=frozenset(shuffled[n_train:]),
        ratio=ratio,
        seed=seed,
    )


@dataclass(frozen=True)
class CaseRun:
    """One trained and scored case; scores cover only held-out samples."""

    case: CaseDefinition
    backbone: Backbone
    model: TrainedModel
    scores: ScoreSet
    train_ids: tuple[str, ...]


def _in_train(record: SampleRecord, case: CaseDefinition, split: BonafideSplit) -> bool:
    if record.label.is_bona_fide:
        return record.sample_id in split.train_ids
    return record.label.species in case.train_species


def _in_test(record: SampleRecord, case: CaseDefinition, split: BonafideSplit) -> bool:
    if record.label.is_bona_fide:
        return record.sample_id in split.test_ids
    return record.label.species is case.test_species


def run_case(
    case: CaseDefinition,
    manifest: DatasetManifest,
    embeddings: EmbeddingMatrix,
    split: BonafideSplit,
    cfg: SvmConfig,
    standardize: bool = True,
) -> CaseRun:
    """Train on train-split bona fide plus train-species attacks, score the rest."""
    train_manifest = manifest.filter(lambda r: _in_train(r, case, split))
    test_manifest = manifest.filter(lambda r: _in_test(r, case, split))

    for name, part in (("train", train_manifest), ("test", test_manifest)):
        counts = part.summarize()
        if counts.bona_fide == 0:
            raise ProtocolError(f"case {case.case_id}: empty {name} partition (no bona fide)")
        if counts.attack_total == 0:
            raise ProtocolError(f"case {case.case_id}: empty {name} partition (no attacks)")

    train_counts = train_manifest.summarize()
    logger.info(
        "case %d (%s): training unweighted on %d bona fide vs %d attacks (imbalance %.2f)",
        case.case_id,
        embeddings.backbone.key,
        train_counts.bona_fide,
        train_counts.attack_total,
        train_counts.attack_total / train_counts.bona_fide,
    )

    x_train = align(embeddings, train_manifest).values.astype(np.float64)
    y_train = np.array(
        [1.0 if r.label.is_bona_fide else -1.0 for r in train_manifest], dtype=np.float64
    )
    scaler = standardize_fit(x_train) if standardize else ScalerStats.identity(x_train.shape[1])
    model = train_linear_svm(scaler.apply(x_train), y_train, cfg, scaler=scaler)

    x_test = align(embeddings, test_manifest).values.astype(np.float64)
    scores = decision_scores(
        model,
        x_test,
        test_manifest.sample_ids,
        [r.label for r in test_manifest],
    )
    return CaseRun(
        case=case,
        backbone=embeddings.backbone,
        model=model,
        scores=scores,
        train_ids=train_manifest.sample_ids,
    )
