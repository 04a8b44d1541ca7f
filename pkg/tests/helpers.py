"""Builders for synthetic manifests, embeddings and score sets."""

from __future__ import annotations

import numpy as np

from padbench import (
    BONA_FIDE,
    Backbone,
    DatasetManifest,
    EmbeddingMatrix,
    PaiSpecies,
    PresentationLabel,
    parse_manifest,
    write_embeddings,
)
from padbench.svm import ScoreEntry, ScoreSet

ATTACK_ECOFLEX = PresentationLabel.attack(PaiSpecies.ECOFLEX)


def make_manifest(n_bona: int, per_species: dict[PaiSpecies, int] | int) -> DatasetManifest:
    if isinstance(per_species, int):
        per_species = {species: per_species for species in PaiSpecies}
    lines = ["sample_id,image_path,label,species,device"]
    for i in range(n_bona):
        lines.append(f"b{i:04d},images/b{i:04d}.png,bona_fide,,iPhone X")
    for species, count in per_species.items():
        for i in range(count):
            lines.append(
                f"{species.value}_{i:04d},images/{species.value}_{i:04d}.png,"
                f"attack,{species.value},Galaxy S20"
            )
    return parse_manifest("\n".join(lines) + "\n")


def gaussian_embeddings(
    manifest: DatasetManifest,
    backbone: Backbone = Backbone.NASNET,
    dim: int = 8,
    bona_shift: float = 0.0,
    seed: int = 0,
) -> EmbeddingMatrix:
    """Unit-variance Gaussian features; bona fide mean moved by ``bona_shift``
    along axis 0."""
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(len(manifest), dim)).astype(np.float32)
    for row, record in enumerate(manifest):
        if record.label.is_bona_fide:
            values[row, 0] += bona_shift
    return EmbeddingMatrix(backbone=backbone, sample_ids=manifest.sample_ids, values=values)


def write_run_env(tmp_path, manifest: DatasetManifest, matrices: list[EmbeddingMatrix]):
    """Write manifest.csv and one .pdbe per matrix; returns (manifest_path, emb_dir)."""
    manifest_path = tmp_path / "manifest.csv"
    manifest_path.write_text(manifest.to_csv(), encoding="utf-8")
    emb_dir = tmp_path / "embeddings"
    emb_dir.mkdir(exist_ok=True)
    for matrix in matrices:
        write_embeddings(matrix, emb_dir / f"{matrix.backbone.key}.pdbe")
    return manifest_path, emb_dir


def score_set(bona: list[float], attack: list[float]) -> ScoreSet:
    entries = [
        ScoreEntry(sample_id=f"b{i}", label=BONA_FIDE, score=float(s))
        for i, s in enumerate(bona)
    ]
    entries += [
        ScoreEntry(sample_id=f"a{i}", label=ATTACK_ECOFLEX, score=float(s))
        for i, s in enumerate(attack)
    ]
    return ScoreSet(entries=tuple(entries))


def random_score_set(rng: np.random.Generator, max_per_class: int = 200) -> ScoreSet:
    """Random sizes and a mix of continuous and heavily tied distributions."""
    n_bona = int(rng.integers(1, max_per_class + 1))
    n_attack = int(rng.integers(1, max_per_class + 1))
    style = rng.integers(0, 3)
    if style == 0:  # continuous, overlapping
        bona = rng.normal(0.5, 1.0, n_bona)
        attack = rng.normal(-0.5, 1.0, n_attack)
    elif style == 1:  # heavy ties, small integer support
        bona = rng.integers(-3, 4, n_bona).astype(float)
        attack = rng.integers(-3, 4, n_attack).astype(float)
    else:  # mixed: ties in one class only
        bona = np.round(rng.normal(0.0, 2.0, n_bona), 1)
        attack = rng.normal(0.0, 2.0, n_attack)
    return score_set(list(bona), list(attack))
