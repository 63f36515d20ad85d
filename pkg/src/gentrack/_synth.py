import itertools
import logging
import math
import pathlib
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from ._appearance import FeatureVector, cosine_similarity, extract_features
from ._io import TrackRecord, write_detections, write_ground_truth, write_pgm
from ._models import BBox, Detection, FrameInput, clamp_to_image, diagonal
from ._rng import SYNTH_STREAM, TEXTURE_STREAM, stream

logger = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]

MAX_TEXTURE_SIMILARITY = 0.9
MAX_TEXTURE_ATTEMPTS = 50
TEXTURE_RESEED_STEP = 7919
BLOCK_SIZE = 4
BACKGROUND_LEVEL = 100
OCCLUDER_LEVEL = 60


@dataclass(frozen=True)
class TargetSpec:
    birth: int
    death: int  # First frame where the target is gone.
    waypoints: tuple[tuple[float, float], ...]
    size: tuple[int, int]
    texture_seed: int = 0

    def alive(self, frame: int) -> bool:
        return self.birth <= frame < self.death

    def position(self, frame: int) -> tuple[float, float]:
        if len(self.waypoints) == 1 or self.death - self.birth <= 1:
            return self.waypoints[0]
        legs = len(self.waypoints) - 1
        t = (frame - self.birth) / (self.death - 1 - self.birth) * legs
        k = min(int(math.floor(t)), legs - 1)
        s = t - k
        (u0, v0), (u1, v1) = self.waypoints[k], self.waypoints[k + 1]
        return (u0 + s * (u1 - u0), v0 + s * (v1 - v0))

    def box(self, frame: int) -> BBox:
        u, v = self.position(frame)
        w, h = self.size
        left = round(u - w / 2)
        top = round(v - h / 2)
        return BBox.from_corners(left, top, w, h)


@dataclass(frozen=True)
class Occluder:
    left: int
    top: int
    width: int
    height: int
    level: int = OCCLUDER_LEVEL

    @property
    def bbox(self) -> BBox:
        return BBox.from_corners(self.left, self.top, self.width, self.height)

    def covers(self, box: BBox) -> bool:
        return (
            self.left <= box.left
            and self.top <= box.top
            and box.right <= self.left + self.width
            and box.bottom <= self.top + self.height
        )


@dataclass(frozen=True)
class NoiseModel:
    center_jitter: float = 0.0  # Gaussian sigma, px.
    size_jitter: float = 0.0  # Gaussian sigma, px.
    dropout: float = 0.0
    false_positive_rate: float = 0.0  # Mean false positives per frame.
    min_confidence: float = 0.05
    false_positive_max_confidence: float = 0.6


ZERO_NOISE = NoiseModel()


@dataclass(frozen=True)
class Scenario:
    width: int
    height: int
    duration: int
    targets: tuple[TargetSpec, ...]
    noise: NoiseModel = ZERO_NOISE
    occluders: tuple[Occluder, ...] = ()
    seed: int = 0
    background: int = BACKGROUND_LEVEL

    def __post_init__(self) -> None:
        for k, target in enumerate(self.targets):
            if not 0 <= target.birth < target.death <= self.duration:
                raise ValueError(
                    f"target {k}: need 0 <= birth < death <= {self.duration}, "
                    f"got birth={target.birth} death={target.death}"
                )
            for frame in range(target.birth, target.death):
                box = target.box(frame)
                if box != clamp_to_image(box, self.width, self.height):
                    raise ValueError(f"target {k} leaves the image at frame {frame}")


@dataclass
class SyntheticSequence:
    scenario: Scenario
    frames: list[np.ndarray] = field(repr=False)
    ground_truth: dict[int, list[TrackRecord]]
    detections: dict[int, list[Detection]]
    texture_seeds: tuple[int, ...] = ()

    def frame_inputs(self) -> list[FrameInput]:
        return [
            FrameInput(index, image, tuple(self.detections.get(index, ())))
            for index, image in enumerate(self.frames)
        ]


def render_texture(width: int, height: int, seed: int) -> np.ndarray:
    rng = stream(seed, TEXTURE_STREAM)
    theta = rng.uniform(0.0, math.pi)
    frequency = rng.uniform(0.12, 0.35)
    phase = rng.uniform(0.0, 2 * math.pi)

    yy, xx = np.mgrid[0:height, 0:width]
    grating = np.sin(
        2 * math.pi * frequency * (xx * math.cos(theta) + yy * math.sin(theta)) + phase
    )
    blocks = rng.uniform(
        -1.0, 1.0, (-(-height // BLOCK_SIZE), -(-width // BLOCK_SIZE))
    )
    noise = np.kron(blocks, np.ones((BLOCK_SIZE, BLOCK_SIZE)))[:height, :width]

    values = 128.0 + 70.0 * grating + 45.0 * noise
    return np.clip(np.rint(values), 10, 245).astype(np.uint8)


def _texture_features(texture: np.ndarray) -> FeatureVector:
    height, width = texture.shape
    return extract_features(texture, BBox(width / 2, height / 2, width, height))


def distinct_textures(
    targets: tuple[TargetSpec, ...]
) -> tuple[list[np.ndarray], list[int]]:
    """
    Render one texture per target, reseeding until every pair of textures
    has HoG cosine similarity below `MAX_TEXTURE_SIMILARITY`.
    """
    textures: list[np.ndarray] = []
    features = []
    seeds: list[int] = []
    for k, target in enumerate(targets):
        w, h = target.size
        seed = target.texture_seed
        for _ in range(MAX_TEXTURE_ATTEMPTS):
            texture = render_texture(w, h, seed)
            feature = _texture_features(texture)
            worst = max(
                (cosine_similarity(feature, other) for other in features), default=0.0
            )
            if worst < MAX_TEXTURE_SIMILARITY:
                break
            logger.warning(
                "texture of target %d too similar to another (%.3f), reseeding",
                k,
                worst,
            )
            seed += TEXTURE_RESEED_STEP
        else:
            raise RuntimeError(f"could not find a distinct texture for target {k}")
        textures.append(texture)
        features.append(feature)
        seeds.append(seed)
    return textures, seeds


def _paste(canvas: np.ndarray, patch: np.ndarray, box: BBox) -> None:
    height, width = canvas.shape
    left, top = int(box.left), int(box.top)
    x0, y0 = max(left, 0), max(top, 0)
    x1 = min(left + patch.shape[1], width)
    y1 = min(top + patch.shape[0], height)
    if x1 <= x0 or y1 <= y0:
        return
    canvas[y0:y1, x0:x1] = patch[y0 - top : y1 - top, x0 - left : x1 - left]


def _degrade(
    box: BBox, noise: NoiseModel, rng: np.random.Generator
) -> tuple[BBox, float]:
    du, dv = rng.normal(0.0, 1.0, 2) * noise.center_jitter
    dw, dh = rng.normal(0.0, 1.0, 2) * noise.size_jitter
    jittered = BBox(box.u + du, box.v + dv, max(box.w + dw, 1.0), max(box.h + dh, 1.0))
    magnitude = math.sqrt(du * du + dv * dv + dw * dw + dh * dh)
    conf = min(1.0, max(noise.min_confidence, 1.0 - magnitude / diagonal(box)))
    return jittered, conf


def generate(scenario: Scenario) -> SyntheticSequence:
    textures, seeds = distinct_textures(scenario.targets)
    noise = scenario.noise
    sizes = [target.size for target in scenario.targets]

    frames = []
    ground_truth: dict[int, list[TrackRecord]] = {}
    detections: dict[int, list[Detection]] = {}

    for frame in range(scenario.duration):
        rng = stream(scenario.seed, SYNTH_STREAM, frame)
        canvas = np.full(
            (scenario.height, scenario.width), scenario.background, dtype=np.uint8
        )
        truth = []
        observed = []

        for k, target in enumerate(scenario.targets):
            if not target.alive(frame):
                continue
            box = target.box(frame)
            _paste(canvas, textures[k], box)
            truth.append(TrackRecord(frame=frame, id=k, bbox=box))

            # Draws happen for every live target to keep the stream aligned.
            dropped = rng.random() < noise.dropout
            det_box, conf = _degrade(box, noise, rng)
            if dropped or any(occ.covers(box) for occ in scenario.occluders):
                continue
            det_box = clamp_to_image(det_box, scenario.width, scenario.height)
            observed.append(Detection(det_box, conf))

        n_false = rng.poisson(noise.false_positive_rate) if sizes else 0
        for _ in range(n_false):
            w, h = sizes[int(rng.integers(len(sizes)))]
            u = rng.uniform(w / 2, scenario.width - w / 2)
            v = rng.uniform(h / 2, scenario.height - h / 2)
            conf = rng.uniform(
                noise.min_confidence, noise.false_positive_max_confidence
            )
            observed.append(Detection(BBox(u, v, w, h), conf))

        for occluder in scenario.occluders:
            _paste(
                canvas,
                np.full((occluder.height, occluder.width), occluder.level, np.uint8),
                occluder.bbox,
            )

        frames.append(canvas)
        ground_truth[frame] = truth
        detections[frame] = observed

    return SyntheticSequence(
        scenario=scenario,
        frames=frames,
        ground_truth=ground_truth,
        detections=detections,
        texture_seeds=tuple(seeds),
    )


def _crossing() -> Scenario:
    return Scenario(
        width=320,
        height=240,
        duration=40,
        targets=(
            TargetSpec(0, 40, ((30.0, 120.0), (290.0, 120.0)), (24, 32), 11),
            TargetSpec(12, 40, ((160.0, 20.0), (160.0, 220.0)), (24, 32), 23),
        ),
    )


def _occlusion5() -> Scenario:
    # 20 px wide at 4 px/frame behind a 36 px pillar: hidden for frames 15-19.
    return Scenario(
        width=320,
        height=240,
        duration=40,
        targets=(
            TargetSpec(0, 40, ((40.0, 120.0), (196.0, 120.0)), (20, 40), 5),
            TargetSpec(0, 40, ((280.0, 40.0), (120.0, 40.0)), (24, 32), 17),
        ),
        occluders=(Occluder(left=90, top=80, width=36, height=100),),
    )


def _churn10() -> Scenario:
    targets = []
    width, lifetime = 24, 48
    for k in range(10):
        lane = 20.0 + 22.0 * k
        path = ((width / 2, lane), (320 - width / 2, lane))
        if k % 2:
            path = path[::-1]
        targets.append(TargetSpec(5 * k, 5 * k + lifetime, path, (width, 18), 101 + k))
    return Scenario(
        width=320,
        height=240,
        duration=5 * 9 + lifetime,
        targets=tuple(targets),
        noise=NoiseModel(center_jitter=1.0, size_jitter=1.0, dropout=0.1),
    )


PRESETS = {
    "crossing": _crossing,
    "occlusion5": _occlusion5,
    "churn10": _churn10,
}


def preset(
    name: str, *, seed: int = 0, noise: Optional[NoiseModel] = None
) -> Scenario:
    try:
        factory = PRESETS[name]
    except KeyError:
        choices = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r} (expected one of: {choices})")
    scenario = replace(factory(), seed=seed)
    if noise is not None:
        scenario = replace(scenario, noise=noise)
    return scenario


def write_scenario(directory: PathLike, sequence: SyntheticSequence) -> None:
    root = pathlib.Path(directory)
    frames_dir = root / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    for index, image in enumerate(sequence.frames):
        write_pgm(frames_dir / f"{index + 1:06d}.pgm", image)
    write_ground_truth(
        root / "gt.txt",
        itertools.chain.from_iterable(sequence.ground_truth.values()),
    )
    write_detections(root / "det.txt", sequence.detections)
