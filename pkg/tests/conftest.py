from __future__ import annotations

import numpy as np
import pytest

from helpers import gaussian_embeddings, make_manifest, write_run_env

from padbench import Backbone


@pytest.fixture
def toy_manifest():
    """8 bona fide plus 2 samples per species."""
    return make_manifest(8, 2)


@pytest.fixture
def toy_run_env(tmp_path, toy_manifest):
    """Well-separated two-backbone run directory on disk."""
    matrices = [
        gaussian_embeddings(toy_manifest, Backbone.NASNET, dim=6, bona_shift=8.0, seed=1),
        gaussian_embeddings(toy_manifest, Backbone.VIT, dim=768, bona_shift=8.0, seed=2),
    ]
    manifest_path, emb_dir = write_run_env(tmp_path, toy_manifest, matrices)
    return manifest_path, emb_dir


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
