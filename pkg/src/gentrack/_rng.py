"""
Seeded random streams.

Every stochastic draw in the package comes from a generator derived from the
session seed and a tuple of integer keys, so results do not depend on the
order in which targets are processed.
"""
import numpy as np

TRACK_STREAM = 1
SYNTH_STREAM = 2
TEXTURE_STREAM = 3


def stream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed)] + [int(key) for key in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def track_stream(seed: int, track_id: int, frame_index: int) -> np.random.Generator:
    return stream(seed, TRACK_STREAM, track_id, frame_index)
