"""
Histogram of Oriented Gradients appearance features.

Patches are resampled to a fixed 64x64 grid so that vectors extracted from
boxes of any size are comparable. Each 8x8 cell contributes a 9-bin unsigned
orientation histogram normalized to unit L2 length.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ._models import BBox, clamp_to_image

logger = logging.getLogger(__name__)

PATCH_SIZE = 64
CELL_SIZE = 8
NUM_BINS = 9
CELLS = PATCH_SIZE // CELL_SIZE
FEATURE_LENGTH = CELLS * CELLS * NUM_BINS
EPSILON = 1e-6


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    degenerate: bool = False

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def zero_features(*, degenerate: bool = False) -> FeatureVector:
    return FeatureVector(np.zeros(FEATURE_LENGTH, dtype=np.float64), degenerate)


def crop(image: np.ndarray, box: BBox) -> np.ndarray:
    height, width = image.shape[:2]
    box = clamp_to_image(box, width, height)
    x0 = int(math.floor(box.left))
    y0 = int(math.floor(box.top))
    x1 = min(int(math.ceil(box.right)), width)
    y1 = min(int(math.ceil(box.bottom)), height)
    return image[y0:y1, x0:x1]


def resample(patch: np.ndarray, size: int = PATCH_SIZE) -> np.ndarray:
    rows = ((np.arange(size) + 0.5) * patch.shape[0] / size).astype(np.intp)
    cols = ((np.arange(size) + 0.5) * patch.shape[1] / size).astype(np.intp)
    return patch[np.ix_(rows, cols)].astype(np.float64)


def extract_features(image: np.ndarray, box: BBox) -> FeatureVector:
    patch = crop(image, box)
    if patch.shape[0] < 2 or patch.shape[1] < 2:
        logger.warning("degenerate patch %s for box %s", patch.shape, box)
        return zero_features(degenerate=True)

    grid = resample(patch)

    gx = np.zeros_like(grid)
    gy = np.zeros_like(grid)
    gx[:, 1:-1] = grid[:, 2:] - grid[:, :-2]
    gy[1:-1, :] = grid[2:, :] - grid[:-2, :]

    magnitude = np.hypot(gx, gy)
    orientation = np.degrees(np.arctan2(gy, gx)) % 180.0
    bins = np.minimum((orientation * NUM_BINS / 180.0).astype(np.intp), NUM_BINS - 1)

    cell_rows = np.arange(PATCH_SIZE) // CELL_SIZE
    cell_index = cell_rows[:, None] * CELLS + cell_rows[None, :]
    flat_index = (cell_index * NUM_BINS + bins).ravel()

    histogram = np.bincount(
        flat_index, weights=magnitude.ravel(), minlength=FEATURE_LENGTH
    ).reshape(CELLS * CELLS, NUM_BINS)
    norms = np.sqrt((histogram ** 2).sum(axis=1, keepdims=True))
    histogram = histogram / (norms + EPSILON)

    return FeatureVector(histogram.ravel())


def cosine_similarity(a: FeatureVector, b: FeatureVector) -> float:
    if len(a) != len(b):
        raise ValueError(f"feature length mismatch: {len(a)} != {len(b)}")
    norm_a = a.norm
    norm_b = b.norm
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    similarity = float(np.dot(a.values, b.values)) / (norm_a * norm_b)
    return min(1.0, max(0.0, similarity))
