from __future__ import annotations

import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def image_factory(tmp_path):
    """Writes random RGB PNGs; returns (dir, make(name, h, w, seed) -> path)."""
    images = tmp_path / "images"
    images.mkdir()

    def make(name: str, height: int = 300, width: int = 400, seed: int = 0):
        rng = np.random.default_rng(seed)
        array = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
        path = images / name
        Image.fromarray(array).save(path)
        return path

    return images, make


def write_manifest(path, rows, header="sample_id,image_path,label,species,device"):
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path
