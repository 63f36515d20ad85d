"""
Domain types and bounding-box geometry.

Boxes are center-parameterized `(u, v, w, h)` everywhere inside the package;
corner form `(left, top, width, height)` only appears at file boundaries.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, NamedTuple, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from ._appearance import FeatureVector


@dataclass(frozen=True)
class BBox:
    u: float
    v: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")

    @classmethod
    def from_corners(
        cls, left: float, top: float, width: float, height: float
    ) -> "BBox":
        return cls(left + width / 2, top + height / 2, width, height)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "BBox":
        u, v, w, h = (float(x) for x in values)
        return cls(u, v, w, h)

    def to_corners(self) -> tuple[float, float, float, float]:
        return (self.u - self.w / 2, self.v - self.h / 2, self.w, self.h)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w, self.h], dtype=np.float64)

    @property
    def left(self) -> float:
        return self.u - self.w / 2

    @property
    def top(self) -> float:
        return self.v - self.h / 2

    @property
    def right(self) -> float:
        return self.u + self.w / 2

    @property
    def bottom(self) -> float:
        return self.v + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Velocity4:
    du: float = 0.0
    dv: float = 0.0
    dw: float = 0.0
    dh: float = 0.0

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Velocity4":
        du, dv, dw, dh = (float(x) for x in values)
        return cls(du, dv, dw, dh)

    def as_array(self) -> np.ndarray:
        return np.array([self.du, self.dv, self.dw, self.dh], dtype=np.float64)

    @property
    def planar_speed(self) -> float:
        return math.hypot(self.du, self.dv)


ZERO_VELOCITY = Velocity4()


@dataclass(frozen=True)
class Detection:
    bbox: BBox
    conf: float = 1.0
    class_id: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.conf <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.conf}")


@dataclass(frozen=True)
class Particle:
    state: BBox
    vel: Velocity4
    pbest_state: BBox
    pbest_fitness: float = 0.0
    fitness: float = 0.0


class TrackStatus(Enum):
    STRONG = "strong"
    WEAK = "weak"
    NEW = "new"


@dataclass(frozen=True)
class Track:
    id: int
    state: BBox
    vel: Velocity4
    appearance: "FeatureVector"
    penalty: float = 0.0
    age: int = 0
    status: TrackStatus = TrackStatus.NEW
    particles: tuple[Particle, ...] = ()
    last_global_best: Optional[tuple[BBox, float]] = None
    recovering: bool = False


@dataclass(frozen=True)
class FrameInput:
    index: int
    image: np.ndarray = field(repr=False)
    detections: tuple[Detection, ...] = ()

    @property
    def width(self) -> int:
        return int(self.image.shape[1])

    @property
    def height(self) -> int:
        return int(self.image.shape[0])


class TrackOutput(NamedTuple):
    frame: int
    id: int
    bbox: BBox
    status: TrackStatus
    penalty: float
    age: int
    recovering: bool = False
    reportable: bool = True
    particles: tuple[BBox, ...] = ()


def iou(a: BBox, b: BBox) -> float:
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return min(1.0, inter / union)


def diagonal(b: BBox) -> float:
    return math.hypot(b.w, b.h)


def center_distance(a: BBox, b: BBox) -> float:
    return math.hypot(a.u - b.u, a.v - b.v)


def clamp_to_image(b: BBox, width: float, height: float) -> BBox:
    """
    Clip a box to the image rectangle `[0, width] x [0, height]`.

    A box entirely outside the image collapses onto the nearest 1 px strip
    along the border, so the result always intersects the image.
    """
    if b.left >= 0 and b.top >= 0 and b.right <= width and b.bottom <= height:
        return b

    left = min(max(b.left, 0.0), width)
    right = max(min(b.right, width), 0.0)
    top = min(max(b.top, 0.0), height)
    bottom = max(min(b.bottom, height), 0.0)

    w = max(right - left, 1.0)
    h = max(bottom - top, 1.0)
    left = min(left, width - w)
    top = min(top, height - h)

    return BBox.from_corners(left, top, w, h)


def boxes_to_array(boxes: Sequence[BBox]) -> np.ndarray:
    if not boxes:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([[b.u, b.v, b.w, b.h] for b in boxes], dtype=np.float64)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]), dtype=np.float64)

    a_l = a[:, 0:1] - a[:, 2:3] / 2
    a_r = a[:, 0:1] + a[:, 2:3] / 2
    a_t = a[:, 1:2] - a[:, 3:4] / 2
    a_b = a[:, 1:2] + a[:, 3:4] / 2
    b_l = (b[:, 0] - b[:, 2] / 2)[None, :]
    b_r = (b[:, 0] + b[:, 2] / 2)[None, :]
    b_t = (b[:, 1] - b[:, 3] / 2)[None, :]
    b_b = (b[:, 1] + b[:, 3] / 2)[None, :]

    inter_w = np.maximum(0.0, np.minimum(a_r, b_r) - np.maximum(a_l, b_l))
    inter_h = np.maximum(0.0, np.minimum(a_b, b_b) - np.maximum(a_t, b_t))
    inter = inter_w * inter_h

    area_a = a[:, 2:3] * a[:, 3:4]
    area_b = (b[:, 2] * b[:, 3])[None, :]
    union = area_a + area_b - inter
    return np.minimum(1.0, inter / np.maximum(union, 1e-12))


def center_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]), dtype=np.float64)
    du = a[:, 0:1] - b[:, 0][None, :]
    dv = a[:, 1:2] - b[:, 1][None, :]
    return np.hypot(du, dv)


def diagonal_array(boxes: np.ndarray) -> np.ndarray:
    return np.hypot(boxes[:, 2], boxes[:, 3])
