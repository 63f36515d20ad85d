"""
Status-coded annotation of grayscale frames.
"""
import math
from typing import Sequence

import numpy as np

from .._models import BBox, Detection, TrackOutput, TrackStatus

STRONG_LEVEL = 255
RECOVERING_LEVEL = 192
WEAK_LEVEL = 128
DETECTION_LEVEL = 64
PARTICLE_LEVEL = 224


def level_for(output: TrackOutput) -> int:
    if output.status is not TrackStatus.WEAK:
        return STRONG_LEVEL
    if output.recovering:
        return RECOVERING_LEVEL
    return WEAK_LEVEL


def draw_box(canvas: np.ndarray, box: BBox, level: int) -> None:
    height, width = canvas.shape[:2]
    x0 = min(max(int(math.floor(box.left)), 0), width - 1)
    y0 = min(max(int(math.floor(box.top)), 0), height - 1)
    x1 = min(max(int(math.ceil(box.right)) - 1, 0), width - 1)
    y1 = min(max(int(math.ceil(box.bottom)) - 1, 0), height - 1)
    canvas[y0, x0 : x1 + 1] = level
    canvas[y1, x0 : x1 + 1] = level
    canvas[y0 : y1 + 1, x0] = level
    canvas[y0 : y1 + 1, x1] = level


def draw_point(canvas: np.ndarray, box: BBox, level: int) -> None:
    height, width = canvas.shape[:2]
    x = int(box.u)
    y = int(box.v)
    if 0 <= x < width and 0 <= y < height:
        canvas[y, x] = level


def annotate(
    image: np.ndarray,
    outputs: Sequence[TrackOutput],
    unmatched: Sequence[Detection] = (),
) -> np.ndarray:
    canvas = image.copy()
    for det in unmatched:
        draw_box(canvas, det.bbox, DETECTION_LEVEL)
    for output in outputs:
        for particle in output.particles:
            draw_point(canvas, particle, PARTICLE_LEVEL)
        draw_box(canvas, output.bbox, level_for(output))
    return canvas
