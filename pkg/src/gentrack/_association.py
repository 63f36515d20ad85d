from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._config import TrackerConfig
from ._models import (
    BBox,
    Detection,
    Track,
    boxes_to_array,
    center_distance,
    center_distance_matrix,
    diagonal,
    diagonal_array,
    iou,
    iou_matrix,
)

PADDING_COST = 1.0


@dataclass(frozen=True)
class CostMatrix:
    entries: np.ndarray  # (tracks, detections)

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self.entries.shape
        return (int(rows), int(cols))

    @classmethod
    def empty(cls, rows: int = 0, cols: int = 0) -> "CostMatrix":
        return cls(np.zeros((rows, cols), dtype=np.float64))


class Assignment(NamedTuple):
    pairs: list[tuple[int, int, float]]
    unmatched_tracks: list[int]
    unmatched_detections: list[int]

    @property
    def total_cost(self) -> float:
        return sum(cost for _, _, cost in self.pairs)


def motion_cost(p: BBox, det: BBox) -> float:
    d_od = diagonal(p) + diagonal(det)
    c_iou = 1.0 - iou(p, det)
    c_d = min(center_distance(p, det), d_od) / d_od
    return c_iou * c_d


def motion_cost_matrix(particles: np.ndarray, detections: np.ndarray) -> np.ndarray:
    """
    `motion_cost` between every row of `particles` and of `detections`.
    """
    d_od = diagonal_array(particles)[:, None] + diagonal_array(detections)[None, :]
    c_iou = 1.0 - iou_matrix(particles, detections)
    c_d = np.minimum(center_distance_matrix(particles, detections), d_od) / d_od
    return c_iou * c_d


def cost_matrix(
    tracks: Sequence[Track], detections: Sequence[Detection], cfg: TrackerConfig
) -> CostMatrix:
    if not tracks or not detections:
        return CostMatrix.empty(len(tracks), len(detections))

    det_boxes = boxes_to_array([d.bbox for d in detections])
    confidence_cost = np.array([1.0 - d.conf for d in detections], dtype=np.float64)

    rows = []
    for track in tracks:
        if not track.particles:
            raise ValueError(f"track {track.id} carries no particles")
        particles = boxes_to_array([p.state for p in track.particles])
        mean_motion = motion_cost_matrix(particles, det_boxes).mean(axis=0)
        rows.append(
            cfg.lambda_p * mean_motion
            + cfg.lambda_d * confidence_cost
            + cfg.lambda_h * track.penalty
        )
    return CostMatrix(np.clip(np.vstack(rows), 0.0, 1.0))


def solve(matrix: CostMatrix, gate: float) -> Assignment:
    n_tracks, n_dets = matrix.shape
    if n_tracks == 0 or n_dets == 0:
        return Assignment([], list(range(n_tracks)), list(range(n_dets)))

    size = max(n_tracks, n_dets)
    padded = np.full((size, size), PADDING_COST, dtype=np.float64)
    padded[:n_tracks, :n_dets] = matrix.entries

    row_ind, col_ind = linear_sum_assignment(padded)

    pairs = []
    matched_tracks = set()
    matched_dets = set()
    for r, c in zip(row_ind, col_ind):
        if r >= n_tracks or c >= n_dets:
            continue
        cost = float(matrix.entries[r, c])
        if cost > gate:
            continue
        pairs.append((int(r), int(c), cost))
        matched_tracks.add(int(r))
        matched_dets.add(int(c))

    pairs.sort()
    return Assignment(
        pairs=pairs,
        unmatched_tracks=[i for i in range(n_tracks) if i not in matched_tracks],
        unmatched_detections=[j for j in range(n_dets) if j not in matched_dets],
    )
