"""Region-of-interest extraction: a fixed 128x256 crop around the finger.

The finger center is either given explicitly (manifest column) or found
automatically: Otsu-threshold the saturation-weighted grayscale image and
take the centroid of the largest connected foreground component. Crops that
overflow the image borders are replicate-padded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from . import ExtractorError

ROI_HEIGHT = 128
ROI_WIDTH = 256


@dataclass(frozen=True)
class RoiSpec:
    width: int = ROI_WIDTH
    height: int = ROI_HEIGHT
    center: tuple[int, int] | None = None  # (x, y); None = auto-detect


def load_image(path) -> np.ndarray:
    try:
        with Image.open(path) as image:
            return np.asarray(image.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise ExtractorError(f"unreadable image {path}: {exc}") from None


def otsu_threshold(values: np.ndarray) -> float:
    """Otsu's threshold over a 256-bin histogram of values in [0, 1]."""
    histogram, edges = np.histogram(values, bins=256, range=(0.0, 1.0))
    histogram = histogram.astype(np.float64)
    total = histogram.sum()
    if total == 0:
        return 0.5
    weights = np.cumsum(histogram)
    means = np.cumsum(histogram * edges[:-1])
    grand_mean = means[-1]
    w0 = weights
    w1 = total - weights
    valid = (w0 > 0) & (w1 > 0)
    if not valid.any():
        return 0.5
    between = np.zeros_like(histogram)
    between[valid] = (grand_mean * w0 - means * total)[valid] ** 2 / (w0 * w1 * total**2)[valid]
    # argmax bin is the last background bin; split at its right edge so the
    # strict > mask keeps that bin in the background class.
    return float(edges[int(np.argmax(between)) + 1])


def auto_center(image: np.ndarray) -> tuple[int, int]:
    """Centroid of the largest foreground component of gray*saturation."""
    rgb = image.astype(np.float64) / 255.0
    gray = rgb @ np.array([0.299, 0.587, 0.114])
    high = rgb.max(axis=2)
    low = rgb.min(axis=2)
    saturation = np.where(high > 0, (high - low) / np.maximum(high, 1e-12), 0.0)
    weighted = gray * saturation
    mask = weighted > otsu_threshold(weighted)
    if not mask.any():
        return image.shape[1] // 2, image.shape[0] // 2
    labels, count = ndimage.label(mask)
    largest = int(np.argmax(ndimage.sum_labels(mask, labels, range(1, count + 1)))) + 1
    cy, cx = ndimage.center_of_mass(labels == largest)
    return int(round(cx)), int(round(cy))


def roi_crop(image: np.ndarray, spec: RoiSpec = RoiSpec()) -> np.ndarray:
    """Exact height x width crop centered at spec.center (auto when None)."""
    if image.ndim != 3 or image.shape[2] != 3:
        raise ExtractorError(f"expected an RGB image, got shape {image.shape}")
    cx, cy = spec.center if spec.center is not None else auto_center(image)
    top = cy - spec.height // 2
    left = cx - spec.width // 2

    pad_top = max(0, -top)
    pad_left = max(0, -left)
    pad_bottom = max(0, top + spec.height - image.shape[0])
    pad_right = max(0, left + spec.width - image.shape[1])
    if pad_top or pad_left or pad_bottom or pad_right:
        image = np.pad(
            image,
            ((pad_top, pad_bottom), (pad_left, pad_right), (0, 0)),
            mode="edge",
        )
        top += pad_top
        left += pad_left
    crop = image[top : top + spec.height, left : left + spec.width]
    assert crop.shape == (spec.height, spec.width, 3)
    return np.ascontiguousarray(crop)


def resize_bilinear(crop: np.ndarray, size: int) -> np.ndarray:
    """Resize an ROI crop to the backbone's square input, bilinear."""
    resized = Image.fromarray(crop).resize((size, size), Image.BILINEAR)
    return np.asarray(resized)
