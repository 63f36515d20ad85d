import itertools
import pathlib

import numpy as np
import pytest

from gentrack._appearance import cosine_similarity, extract_features
from gentrack._io import list_frames, read_detections, read_tracks
from gentrack._models import BBox, clamp_to_image
from gentrack._synth import (
    MAX_TEXTURE_SIMILARITY,
    NoiseModel,
    Scenario,
    TargetSpec,
    generate,
    preset,
    write_scenario,
)


def test_zero_noise_detections_equal_ground_truth() -> None:
    sequence = generate(preset("crossing"))
    for frame, truth in sequence.ground_truth.items():
        boxes = [det.bbox for det in sequence.detections[frame]]
        assert boxes == [record.bbox for record in truth]
        assert all(det.conf == 1.0 for det in sequence.detections[frame])


def test_full_dropout_removes_every_detection() -> None:
    sequence = generate(preset("crossing", noise=NoiseModel(dropout=1.0)))
    assert not any(sequence.detections.values())
    assert any(sequence.ground_truth.values())


def test_generation_is_deterministic() -> None:
    a = generate(preset("churn10", seed=3))
    b = generate(preset("churn10", seed=3))
    c = generate(preset("churn10", seed=4))
    assert a.detections == b.detections
    assert all((x == y).all() for x, y in zip(a.frames, b.frames))
    assert a.detections != c.detections


@pytest.mark.parametrize(
    "name, targets, frames",
    [("crossing", 2, 40), ("occlusion5", 2, 40), ("churn10", 10, 93)],
)
def test_preset_shapes(name: str, targets: int, frames: int) -> None:
    sequence = generate(preset(name))
    ids = {record.id for truth in sequence.ground_truth.values() for record in truth}
    assert ids == set(range(targets))
    assert len(sequence.frames) == frames
    assert sequence.frames[0].shape == (240, 320)


def test_occluded_target_loses_detections_for_five_frames() -> None:
    sequence = generate(preset("occlusion5"))
    hidden = []
    for frame, truth in sequence.ground_truth.items():
        (target,) = [record for record in truth if record.id == 0]
        boxes = [det.bbox for det in sequence.detections[frame]]
        if target.bbox not in boxes:
            hidden.append(frame)
    assert hidden == [15, 16, 17, 18, 19]


def test_occluder_is_painted_over_targets() -> None:
    scenario = preset("occlusion5")
    sequence = generate(scenario)
    (occluder,) = scenario.occluders
    region = sequence.frames[17][
        occluder.top : occluder.top + occluder.height,
        occluder.left : occluder.left + occluder.width,
    ]
    assert (region == occluder.level).all()


def test_unknown_preset() -> None:
    with pytest.raises(ValueError, match="unknown preset"):
        preset("stampede")


@pytest.mark.parametrize("name", ["crossing", "occlusion5", "churn10"])
def test_ground_truth_stays_inside_image(name: str) -> None:
    sequence = generate(preset(name))
    for truth in sequence.ground_truth.values():
        for record in truth:
            assert clamp_to_image(record.bbox, 320, 240) == record.bbox


def test_target_leaving_image_is_rejected() -> None:
    target = TargetSpec(0, 10, ((10.0, 50.0), (400.0, 50.0)), (10, 10))
    with pytest.raises(ValueError, match="leaves the image"):
        Scenario(width=100, height=100, duration=10, targets=(target,))


def test_target_textures_are_distinct() -> None:
    sequence = generate(preset("churn10"))
    features = []
    for target in sequence.scenario.targets:
        frame = target.birth
        box = target.box(frame)
        features.append(extract_features(sequence.frames[frame], box))
    for a, b in itertools.combinations(features, 2):
        assert cosine_similarity(a, b) < MAX_TEXTURE_SIMILARITY
    assert len(sequence.texture_seeds) == 10


def test_noisy_detections_stay_in_image() -> None:
    noise = NoiseModel(center_jitter=3.0, size_jitter=2.0, false_positive_rate=2.0)
    sequence = generate(preset("churn10", noise=noise))
    for detections in sequence.detections.values():
        for det in detections:
            assert clamp_to_image(det.bbox, 320, 240) == det.bbox
            assert 0.05 <= det.conf <= 1.0


def test_write_scenario(tmp_path: pathlib.Path) -> None:
    sequence = generate(preset("crossing"))
    write_scenario(tmp_path, sequence)
    assert len(list_frames(tmp_path / "frames")) == 40
    gt = read_tracks(tmp_path / "gt.txt")
    assert gt[12][1].bbox == sequence.ground_truth[12][1].bbox
    detections = read_detections(tmp_path / "det.txt")
    assert sum(len(d) for d in detections.values()) == 40 + 28
    assert np.isclose(detections[0][0].bbox.w, 24)


def test_box_is_pixel_aligned() -> None:
    target = TargetSpec(0, 3, ((10.3, 20.6), (12.1, 20.6)), (5, 6))
    box = target.box(1)
    assert box == BBox.from_corners(round(11.2 - 2.5), round(20.6 - 3), 5, 6)
