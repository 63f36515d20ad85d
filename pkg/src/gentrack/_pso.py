"""
Per-target particle swarm refinement.

One swarm per target. Particles are scored against the target's previous
optimal state (history), against their own previous iterate (exploration)
and, for the social variant, against the target's neighbours. Personal and
global bests are replaced only by strictly better candidates, and the global
best starts at the target's motion prediction.
"""
from dataclasses import replace
from typing import NamedTuple, Sequence

import numpy as np

from ._appearance import FeatureVector, extract_features
from ._config import InitMode, ResampleMode, TrackerConfig
from ._fitness import FitnessBreakdown, Neighbor, compose, pair_fitness, social_fitness
from ._models import (
    BBox,
    Particle,
    Track,
    Velocity4,
    boxes_to_array,
    clamp_to_image,
    diagonal,
)
from ._motion import (
    MotionBounds,
    configured_bounds,
    configured_propagate,
    floor_size,
)


class SwarmResult(NamedTuple):
    particles: tuple[Particle, ...]
    gbest_state: BBox
    gbest_fitness: float
    gbest_history_fitness: float
    trace: tuple[float, ...] = ()

    @property
    def gbest(self) -> tuple[BBox, float]:
        return (self.gbest_state, self.gbest_fitness)


def init_swarm(
    track: Track,
    bounds: MotionBounds,
    mode: InitMode,
    rng: np.random.Generator,
    cfg: TrackerConfig,
) -> list[Particle]:
    bases: Sequence[tuple[BBox, Velocity4]]
    if mode is InitMode.FROM_PARTICLES and track.particles:
        bases = [(p.state, p.vel) for p in track.particles]
    else:
        bases = [(track.state, track.vel)]

    particles = []
    for s in range(cfg.swarm_size):
        state, vel = bases[s % len(bases)]
        state, vel = configured_propagate(state, vel, bounds, rng, cfg)
        particles.append(Particle(state=state, vel=vel, pbest_state=state))
    return particles


def evaluate_particle(
    state: BBox,
    features: FeatureVector,
    vel: Velocity4,
    previous: tuple[BBox, FeatureVector],
    track: Track,
    neighbors: Sequence[Neighbor],
    bounds: MotionBounds,
    cfg: TrackerConfig,
) -> FitnessBreakdown:
    pair_weights = {"lambda_s": cfg.lambda_s, "lambda_m": cfg.lambda_m}
    f_history = pair_fitness(
        state, features, track.state, track.appearance, **pair_weights
    )
    previous_state, previous_features = previous
    f_explore = pair_fitness(
        state, features, previous_state, previous_features, **pair_weights
    )
    f_social = 0.0
    if cfg.social:
        f_social = social_fitness(
            state,
            vel,
            neighbors,
            diagonal(track.state),
            bounds.social_speed_cap,
            xi_p=cfg.xi_p,
            xi_v=cfg.xi_v,
        )
    combined = compose(
        f_history, f_explore, f_social, cfg.variant, cfg.fitness_weights
    )
    return FitnessBreakdown(f_history, f_explore, f_social, combined)


def velocity_update(
    velocities: np.ndarray,
    positions: np.ndarray,
    pbest: np.ndarray,
    gbest: np.ndarray,
    v_max: np.ndarray,
    rng: np.random.Generator,
    cfg: TrackerConfig,
) -> np.ndarray:
    r_p = rng.random(positions.shape)
    r_g = rng.random(positions.shape)
    velocities = (
        cfg.inertia * velocities
        + r_p * cfg.phi_p * (pbest - positions)
        + r_g * cfg.phi_g * (gbest[None, :] - positions)
    )
    return np.clip(velocities, -v_max, v_max)


def predicted_state(track: Track, cfg: TrackerConfig, width: int, height: int) -> BBox:
    advanced = track.state.as_array() + cfg.lambda_v * track.vel.as_array()
    return clamp_to_image(BBox.from_array(floor_size(advanced)), width, height)


def run_pso(
    track: Track,
    image: np.ndarray,
    neighbors: Sequence[Neighbor],
    cfg: TrackerConfig,
    rng: np.random.Generator,
) -> SwarmResult:
    """
    Refine `track.particles` for `cfg.pso_iters` iterations.

    At the first iteration particles explore relative to the track's previous
    optimum and template.
    """
    if not track.particles:
        raise ValueError(f"track {track.id} has no particles to refine")

    height, width = image.shape[:2]
    bounds = configured_bounds(track.state, cfg)
    motion_vels = [p.vel for p in track.particles]
    reference = (track.state, track.appearance)

    predicted = predicted_state(track, cfg, width, height)
    seed_scores = evaluate_particle(
        predicted,
        extract_features(image, predicted),
        track.vel,
        reference,
        track,
        neighbors,
        bounds,
        cfg,
    )

    positions = boxes_to_array([p.state for p in track.particles])
    velocities = np.zeros_like(positions)
    pbest = positions.copy()
    pbest_fitness = np.full(len(positions), -1.0)
    gbest = predicted.as_array()
    gbest_fitness = seed_scores.combined
    gbest_history = seed_scores.f_history
    trace = []

    previous = [reference] * len(positions)

    for iteration in range(cfg.pso_iters):
        boxes = [BBox.from_array(x) for x in positions]
        features = [extract_features(image, box) for box in boxes]

        for s, box in enumerate(boxes):
            scores = evaluate_particle(
                box,
                features[s],
                motion_vels[s],
                previous[s],
                track,
                neighbors,
                bounds,
                cfg,
            )
            if scores.combined > pbest_fitness[s]:
                pbest[s] = positions[s]
                pbest_fitness[s] = scores.combined
                if scores.combined > gbest_fitness:
                    gbest = positions[s].copy()
                    gbest_fitness = scores.combined
                    gbest_history = scores.f_history

        trace.append(gbest_fitness)
        if iteration == cfg.pso_iters - 1:
            break

        velocities = velocity_update(
            velocities, positions, pbest, gbest, bounds.v_max, rng, cfg
        )
        previous = list(zip(boxes, features))
        positions = boxes_to_array(
            [
                clamp_to_image(BBox.from_array(floor_size(x)), width, height)
                for x in positions + velocities
            ]
        )

    particles = tuple(
        Particle(
            state=BBox.from_array(pbest[s]),
            vel=motion_vels[s],
            pbest_state=BBox.from_array(pbest[s]),
            pbest_fitness=float(pbest_fitness[s]),
            fitness=float(pbest_fitness[s]),
        )
        for s in range(len(pbest))
    )
    return SwarmResult(
        particles=particles,
        gbest_state=BBox.from_array(gbest),
        gbest_fitness=float(gbest_fitness),
        gbest_history_fitness=float(gbest_history),
        trace=tuple(float(f) for f in trace),
    )


def resample(
    particles: Sequence[Particle],
    gbest: tuple[BBox, float],
    mode: ResampleMode,
    sigma_0: float,
) -> list[Particle]:
    if mode is ResampleMode.NONE or not particles:
        return list(particles)

    if mode is ResampleMode.DISCARD:
        survivors = [p for p in particles if p.fitness >= sigma_0]
        if not survivors:
            survivors = [max(particles, key=lambda p: p.fitness)]
        return survivors

    state, fitness = gbest
    return [
        p
        if p.fitness >= sigma_0
        else replace(
            p,
            state=state,
            pbest_state=state,
            fitness=fitness,
            pbest_fitness=fitness,
        )
        for p in particles
    ]
