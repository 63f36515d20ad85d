from dataclasses import replace
from typing import Sequence

import numpy as np

from ._appearance import extract_features
from ._config import TrackerConfig
from ._fitness import Neighbor
from ._models import (
    BBox,
    Detection,
    Track,
    TrackStatus,
    Velocity4,
    center_distance,
    diagonal,
)
from ._motion import configured_bounds, floor_size
from ._pso import SwarmResult


def smooth_velocity(v_now: Velocity4, v_prev: Velocity4) -> Velocity4:
    return Velocity4.from_array((v_now.as_array() + v_prev.as_array()) / 2)


def displacement(before: BBox, after: BBox) -> Velocity4:
    return Velocity4.from_array(after.as_array() - before.as_array())


def _capped(vel: Velocity4, state: BBox, cfg: TrackerConfig) -> Velocity4:
    v_max = configured_bounds(state, cfg).v_max
    return Velocity4.from_array(np.clip(vel.as_array(), -v_max, v_max))


def update_matched(
    track: Track,
    det: Detection,
    image: np.ndarray,
    cfg: TrackerConfig = TrackerConfig(),
) -> Track:
    vel = smooth_velocity(displacement(track.state, det.bbox), track.vel)
    return replace(
        track,
        state=det.bbox,
        vel=_capped(vel, det.bbox, cfg),
        appearance=extract_features(image, det.bbox),
        penalty=0.0,
        age=0,
        status=TrackStatus.STRONG,
        recovering=False,
    )


def spawn(det: Detection, next_id: int, image: np.ndarray) -> Track:
    return Track(
        id=next_id,
        state=det.bbox,
        vel=Velocity4(),
        appearance=extract_features(image, det.bbox),
        status=TrackStatus.NEW,
    )


def update_weak_basic(track: Track, cfg: TrackerConfig = TrackerConfig()) -> Track:
    state = BBox.from_array(floor_size(track.state.as_array() + track.vel.as_array()))
    penalty = min(track.penalty + cfg.rho_max / cfg.max_age, cfg.rho_max)
    return replace(
        track,
        state=state,
        penalty=penalty,
        age=track.age + 1,
        status=TrackStatus.WEAK,
        recovering=False,
    )


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def update_weak_pso(
    track: Track, swarm: SwarmResult, cfg: TrackerConfig = TrackerConfig()
) -> Track:
    f_g = swarm.gbest_history_fitness
    direction = _sign(cfg.rho_re - f_g)
    delta = cfg.rho_max * (2.0 - f_g) / cfg.max_age

    # Position follows the global best, which already carries the velocity
    # advance. Size is held; the size velocity decays through smoothing.
    x = track.state.as_array()
    x[:2] = swarm.gbest_state.as_array()[:2]
    state = BBox.from_array(x)
    vel = smooth_velocity(displacement(track.state, state), track.vel)

    return replace(
        track,
        state=state,
        vel=_capped(vel, state, cfg),
        penalty=min(max(track.penalty + direction * delta, 0.0), cfg.rho_max),
        age=max(track.age + direction, 0),
        status=TrackStatus.WEAK,
        last_global_best=swarm.gbest,
        recovering=f_g > cfg.rho_re,
    )


def update_weak_social(
    track: Track,
    swarm: SwarmResult,
    neighbors: Sequence[Neighbor],
    cfg: TrackerConfig = TrackerConfig(),
) -> Track:
    updated = update_weak_pso(track, swarm, cfg)
    if not neighbors:
        return updated

    x = updated.state.as_array()
    mean = np.mean([state.as_array() for state, _ in neighbors], axis=0)

    planar = updated.vel.as_array()[:2]
    speed = float(np.linalg.norm(planar))
    if speed > 0:
        direction = planar / speed
        offset = mean[:2] - x[:2]
        x[:2] += cfg.sigma_s * float(np.dot(offset, direction)) * direction
    x[2:] += cfg.sigma_s * (mean[2:] - x[2:])

    return replace(updated, state=BBox.from_array(floor_size(x)))


def neighbor_search(
    track: Track, all_tracks: Sequence[Track], expanded: bool = False
) -> list[Neighbor]:
    radius = diagonal(track.state)
    if expanded:
        radius *= 2.0
    return [
        (other.state, other.vel)
        for other in all_tracks
        if other.id != track.id and center_distance(track.state, other.state) <= radius
    ]


def in_entrance_area(state: BBox, width: float, height: float, margin: float) -> bool:
    return (
        state.u <= margin
        or state.v <= margin
        or state.u >= width - margin
        or state.v >= height - margin
    )


def prune(
    tracks: Sequence[Track],
    cfg: TrackerConfig = TrackerConfig(),
    frame_size: tuple[int, int] = (0, 0),
) -> list[Track]:
    """
    Keep tracks younger than `max_age`.

    Weak tracks centred within the entrance margin of the image border age one
    extra frame first. `frame_size` is `(width, height)`; `(0, 0)` disables
    the entrance rule.
    """
    width, height = frame_size
    margin = cfg.margin_for(width, height) if width and height else None

    kept = []
    for track in tracks:
        if (
            margin is not None
            and track.status is TrackStatus.WEAK
            and in_entrance_area(track.state, width, height, margin)
        ):
            track = replace(track, age=track.age + 1)
        if track.age < cfg.max_age:
            kept.append(track)
    return kept
