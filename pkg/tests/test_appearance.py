import logging
from typing import Any

import numpy as np
import pytest

from gentrack._appearance import (
    FEATURE_LENGTH,
    NUM_BINS,
    FeatureVector,
    cosine_similarity,
    extract_features,
)
from gentrack._models import BBox


def _vector(*values: float) -> FeatureVector:
    return FeatureVector(np.array(values, dtype=np.float64))


def test_uniform_patch_has_no_gradients() -> None:
    image = np.full((40, 40), 128, dtype=np.uint8)
    features = extract_features(image, BBox(20, 20, 16, 16))
    assert len(features) == FEATURE_LENGTH
    assert not features.values.any()
    assert not features.degenerate


def test_extraction_is_deterministic() -> None:
    rng = np.random.default_rng(0)
    image = rng.integers(0, 256, (60, 80), dtype=np.uint8)
    box = BBox(30.5, 25.2, 21, 17)
    a = extract_features(image, box)
    b = extract_features(image, box)
    assert a.values.tobytes() == b.values.tobytes()
    assert (a.values >= 0).all()


def test_vertical_edge_fills_horizontal_gradient_bin() -> None:
    image = np.zeros((32, 32), dtype=np.uint8)
    image[:, 16:] = 255
    features = extract_features(image, BBox(16, 16, 20, 20))
    per_bin = features.values.reshape(-1, NUM_BINS).sum(axis=0)
    assert per_bin[0] > 0
    assert per_bin[1:].sum() == 0


def test_degenerate_patch_is_flagged(caplog: Any) -> None:
    image = np.full((20, 20), 50, dtype=np.uint8)
    with caplog.at_level(logging.WARNING):
        features = extract_features(image, BBox(5.5, 5.5, 1, 1))
    assert features.degenerate
    assert len(features) == FEATURE_LENGTH
    assert not features.values.any()
    assert "degenerate patch" in caplog.text


def test_box_outside_image_is_clamped_before_cropping() -> None:
    image = np.zeros((30, 30), dtype=np.uint8)
    image[:, 15:] = 200
    features = extract_features(image, BBox(25, 15, 20, 20))
    assert len(features) == FEATURE_LENGTH


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (_vector(1, 2, 3), _vector(1, 2, 3), 1.0),
        (_vector(1, 0, 0), _vector(0, 2, 0), 0.0),
        (_vector(1, 1, 0), _vector(1, 0, 0), 2 ** -0.5),
        pytest.param(_vector(0, 0, 0), _vector(1, 0, 0), 0.0, id="zero-norm"),
    ],
)
def test_cosine_similarity(a: FeatureVector, b: FeatureVector, expected: float) -> None:
    assert cosine_similarity(a, b) == pytest.approx(expected)


def test_cosine_similarity_is_scale_invariant() -> None:
    a = _vector(0.2, 0.5, 0.1)
    b = _vector(0.4, 0.1, 0.9)
    scaled = FeatureVector(a.values * 7.5)
    assert cosine_similarity(scaled, b) == pytest.approx(cosine_similarity(a, b))


def test_cosine_similarity_length_mismatch() -> None:
    with pytest.raises(ValueError):
        cosine_similarity(_vector(1, 2), _vector(1, 2, 3))


def test_cosine_similarity_stays_in_unit_range() -> None:
    rng = np.random.default_rng(4)
    for _ in range(1000):
        a = FeatureVector(rng.random(16))
        b = FeatureVector(rng.random(16))
        assert 0.0 <= cosine_similarity(a, b) <= 1.0
