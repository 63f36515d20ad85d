"""
Per-frame orchestration: sample, associate, update, prune, emit.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from ._association import cost_matrix, solve
from ._config import TrackerConfig, Variant
from ._exceptions import FrameOrderError
from ._lifecycle import (
    in_entrance_area,
    neighbor_search,
    prune,
    spawn,
    update_matched,
    update_weak_basic,
    update_weak_pso,
    update_weak_social,
)
from ._models import (
    Detection,
    FrameInput,
    Particle,
    Track,
    TrackOutput,
    TrackStatus,
    clamp_to_image,
)
from ._motion import configured_bounds
from ._pso import SwarmResult, init_swarm, resample, run_pso
from ._rng import track_stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrackerState:
    config: TrackerConfig
    tracks: tuple[Track, ...] = ()
    next_id: int = 0
    last_index: Optional[int] = None
    unmatched_detections: tuple[Detection, ...] = field(default=(), repr=False)


Sampled = tuple[Track, Optional[SwarmResult]]


def reset(cfg: TrackerConfig) -> TrackerState:
    cfg.validate()
    logger.info(
        "tracker reset: variant=%s particles=%d seed=%d",
        cfg.variant.value,
        cfg.swarm_size,
        cfg.seed,
    )
    return TrackerState(config=cfg)


def _clamp_particles(
    particles: Sequence[Particle], width: int, height: int
) -> tuple[Particle, ...]:
    return tuple(
        replace(
            p,
            state=clamp_to_image(p.state, width, height),
            pbest_state=clamp_to_image(p.pbest_state, width, height),
        )
        for p in particles
    )


def _sample(
    track: Track, frame: FrameInput, snapshot: Sequence[Track], cfg: TrackerConfig
) -> Sampled:
    rng = track_stream(cfg.seed, track.id, frame.index)
    bounds = configured_bounds(track.state, cfg)
    particles = init_swarm(track, bounds, cfg.init_mode, rng, cfg)
    track = replace(
        track, particles=_clamp_particles(particles, frame.width, frame.height)
    )
    if cfg.variant is Variant.BASIC:
        return track, None

    neighbors = neighbor_search(track, snapshot) if cfg.social else []
    swarm = run_pso(track, frame.image, neighbors, cfg, rng)
    survivors = resample(swarm.particles, swarm.gbest, cfg.resample_mode, cfg.sigma_0)
    track = replace(track, particles=tuple(survivors), last_global_best=swarm.gbest)
    return track, swarm


def _sample_all(
    tracks: Sequence[Track], frame: FrameInput, cfg: TrackerConfig
) -> list[Sampled]:
    if cfg.workers > 1 and len(tracks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            return list(
                executor.map(lambda track: _sample(track, frame, tracks, cfg), tracks)
            )
    return [_sample(track, frame, tracks, cfg) for track in tracks]


def _update_weak(
    track: Track,
    swarm: Optional[SwarmResult],
    snapshot: Sequence[Track],
    cfg: TrackerConfig,
) -> Track:
    if cfg.variant is Variant.BASIC or swarm is None:
        return update_weak_basic(track, cfg)
    if cfg.variant is Variant.PSO:
        return update_weak_pso(track, swarm, cfg)
    neighbors = neighbor_search(track, snapshot)
    if not neighbors:
        neighbors = neighbor_search(track, snapshot, expanded=True)
    return update_weak_social(track, swarm, neighbors, cfg)


def _is_reportable(track: Track, cfg: TrackerConfig, width: int, height: int) -> bool:
    if track.status is not TrackStatus.WEAK:
        return True
    # Weak tracks at the border are most likely targets that just left.
    if in_entrance_area(track.state, width, height, cfg.margin_for(width, height)):
        return False
    return track.recovering or track.age <= cfg.report_weak_age


def _output(track: Track, frame: FrameInput, cfg: TrackerConfig) -> TrackOutput:
    return TrackOutput(
        frame=frame.index,
        id=track.id,
        bbox=track.state,
        status=track.status,
        penalty=track.penalty,
        age=track.age,
        recovering=track.recovering,
        reportable=_is_reportable(track, cfg, frame.width, frame.height),
        particles=tuple(p.state for p in track.particles),
    )


def step(
    state: TrackerState, frame: FrameInput
) -> tuple[TrackerState, list[TrackOutput]]:
    if state.last_index is not None and frame.index <= state.last_index:
        raise FrameOrderError(frame.index, state.last_index)

    cfg = state.config
    width, height = frame.width, frame.height
    detections = [
        replace(det, bbox=clamp_to_image(det.bbox, width, height))
        for det in frame.detections
    ]

    sampled = _sample_all(state.tracks, frame, cfg)
    tracks = [track for track, _ in sampled]
    swarms = [swarm for _, swarm in sampled]

    assignment = solve(cost_matrix(tracks, detections, cfg), cfg.gate_cost)

    updated: dict[int, Track] = {}
    for i, j, _ in assignment.pairs:
        updated[i] = update_matched(tracks[i], detections[j], frame.image, cfg)

    # Matched tracks contribute their detections; weak ones their previous optimum.
    snapshot = [updated.get(i, track) for i, track in enumerate(tracks)]
    for i in assignment.unmatched_tracks:
        weak = _update_weak(tracks[i], swarms[i], snapshot, cfg)
        updated[i] = replace(weak, state=clamp_to_image(weak.state, width, height))

    next_id = state.next_id
    spawned = []
    for j in assignment.unmatched_detections:
        spawned.append(spawn(detections[j], next_id, frame.image))
        next_id += 1

    survivors = [updated[i] for i in range(len(tracks))] + spawned
    live = prune(survivors, cfg, (width, height))

    logger.debug(
        "frame %d: tracks=%d detections=%d pairs=%d spawned=%d pruned=%d",
        frame.index,
        len(tracks),
        len(detections),
        len(assignment.pairs),
        len(spawned),
        len(survivors) - len(live),
    )

    live.sort(key=lambda track: track.id)
    new_state = TrackerState(
        config=cfg,
        tracks=tuple(live),
        next_id=next_id,
        last_index=frame.index,
        unmatched_detections=tuple(
            detections[j] for j in assignment.unmatched_detections
        ),
    )
    return new_state, [_output(track, frame, cfg) for track in live]


class Tracker:
    def __init__(self, config: Optional[TrackerConfig] = None) -> None:
        self._config = config if config is not None else TrackerConfig()
        self._state = reset(self._config)

    @property
    def config(self) -> TrackerConfig:
        return self._config

    @property
    def snapshot(self) -> tuple[Track, ...]:
        return self._state.tracks

    @property
    def state(self) -> TrackerState:
        return self._state

    def reset(self, config: Optional[TrackerConfig] = None) -> None:
        if config is not None:
            self._config = config
        self._state = reset(self._config)

    def step(self, frame: FrameInput) -> list[TrackOutput]:
        self._state, outputs = step(self._state, frame)
        return outputs


def track_sequence(
    cfg: TrackerConfig, frames: Iterable[FrameInput]
) -> list[TrackOutput]:
    tracker = Tracker(cfg)
    outputs: list[TrackOutput] = []
    for frame in frames:
        outputs.extend(tracker.step(frame))
    return outputs
