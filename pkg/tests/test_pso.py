import math
from dataclasses import replace
from typing import Any

import numpy as np
import pytest

from gentrack._appearance import extract_features
from gentrack._config import InitMode, ResampleMode, TrackerConfig, Variant
from gentrack._models import BBox, Particle, Track, Velocity4, center_distance
from gentrack._motion import configured_bounds
from gentrack._pso import init_swarm, resample, run_pso, velocity_update
from gentrack._synth import render_texture


def _scene(seed: int = 0) -> tuple[np.ndarray, BBox]:
    image = np.full((120, 160), 100, dtype=np.uint8)
    target = BBox(80, 60, 24, 32)
    texture = render_texture(24, 32, seed + 11)
    image[44:76, 68:92] = texture
    return image, target


def _track(image: np.ndarray, state: BBox, **kwargs: Any) -> Track:
    return Track(
        id=0,
        state=state,
        vel=Velocity4(),
        appearance=extract_features(image, state),
        **kwargs,
    )


def _with_swarm(track: Track, cfg: TrackerConfig, seed: int) -> Track:
    rng = np.random.default_rng(seed)
    bounds = configured_bounds(track.state, cfg)
    particles = init_swarm(track, bounds, cfg.init_mode, rng, cfg)
    return replace(track, particles=tuple(particles))


def test_single_particle_init_without_noise() -> None:
    cfg = TrackerConfig(variant=Variant.PSO, particles=1, eps_x=0.0, eps_v=0.0)
    state = BBox(50, 50, 10, 10)
    track = Track(0, state, Velocity4(1, 2, 0, 0), appearance=None)  # type: ignore
    particles = init_swarm(
        track,
        configured_bounds(state, cfg),
        InitMode.FROM_OPTIMUM,
        np.random.default_rng(0),
        cfg,
    )
    assert len(particles) == 1
    assert particles[0].state == BBox(51, 52, 10, 10)
    assert particles[0].pbest_state == particles[0].state


def test_init_from_particles_cycles_previous_swarm() -> None:
    cfg = TrackerConfig(variant=Variant.PSO, particles=4, eps_x=0.0, eps_v=0.0)
    previous = tuple(
        Particle(BBox(10 + 20 * k, 50, 10, 10), Velocity4(), BBox(10, 50, 10, 10))
        for k in range(2)
    )
    track = Track(
        0, BBox(30, 50, 10, 10), Velocity4(), None, particles=previous  # type: ignore
    )
    particles = init_swarm(
        track,
        configured_bounds(track.state, cfg),
        InitMode.FROM_PARTICLES,
        np.random.default_rng(0),
        cfg,
    )
    assert [p.state.u for p in particles] == [10, 30, 10, 30]


def test_trace_is_monotone() -> None:
    image, target = _scene()
    cfg = TrackerConfig(variant=Variant.PSO, pso_iters=6)
    track = _with_swarm(_track(image, replace(target, u=target.u + 4)), cfg, 1)
    swarm = run_pso(track, image, [], cfg, np.random.default_rng(1))
    assert len(swarm.trace) == cfg.pso_iters
    assert all(b >= a for a, b in zip(swarm.trace, swarm.trace[1:]))
    assert swarm.trace[-1] == swarm.gbest_fitness
    assert 0.0 <= swarm.gbest_fitness <= 1.0


def test_identical_swarm_stays_on_optimum() -> None:
    image, target = _scene()
    cfg = TrackerConfig(variant=Variant.PSO, particles=4)
    particle = Particle(target, Velocity4(), target)
    track = _track(image, target, particles=(particle,) * 4)
    swarm = run_pso(track, image, [], cfg, np.random.default_rng(0))
    assert swarm.gbest_state == target
    assert swarm.gbest_fitness == pytest.approx(1.0)
    assert swarm.gbest_history_fitness == pytest.approx(1.0)
    assert all(p.state == target for p in swarm.particles)


def test_returned_particles_sit_at_personal_best() -> None:
    image, target = _scene()
    cfg = TrackerConfig(variant=Variant.PSO_SOCIAL)
    track = _with_swarm(_track(image, target), cfg, 5)
    neighbor = (BBox(100, 60, 24, 32), Velocity4(-2, 0, 0, 0))
    swarm = run_pso(track, image, [neighbor], cfg, np.random.default_rng(5))
    assert len(swarm.particles) == cfg.swarm_size
    for p in swarm.particles:
        assert p.state == p.pbest_state
        assert p.fitness == p.pbest_fitness <= swarm.gbest_fitness


def test_run_pso_requires_particles() -> None:
    image, target = _scene()
    with pytest.raises(ValueError):
        run_pso(_track(image, target), image, [], TrackerConfig(), None)  # type: ignore


def _offset_scene(seed: int) -> tuple[np.ndarray, BBox]:
    image = np.full((160, 200), 100, dtype=np.uint8)
    target = BBox(100, 80, 32, 24)
    image[68:92, 84:116] = render_texture(32, 24, seed + 11)
    return image, target


def test_swarm_converges_toward_target() -> None:
    cfg = TrackerConfig(variant=Variant.PSO, pso_iters=4)
    closer = 0
    for seed in range(100):
        image, target = _offset_scene(seed)
        track = replace(
            _track(image, target), state=replace(target, u=target.u - target.w)
        )
        track = _with_swarm(track, cfg, seed)
        mean_u, mean_v = np.mean([(p.state.u, p.state.v) for p in track.particles], 0)
        start = math.hypot(mean_u - target.u, mean_v - target.v)
        swarm = run_pso(track, image, [], cfg, np.random.default_rng(seed))
        if center_distance(swarm.gbest_state, target) < start:
            closer += 1
    assert closer >= 95


def test_first_iteration_explores_from_previous_optimum() -> None:
    image, target = _scene()
    cfg = TrackerConfig(variant=Variant.PSO, particles=1, pso_iters=2)
    track = replace(
        _track(image, target),
        state=replace(target, u=target.u - 24),
        particles=(Particle(target, Velocity4(), target),),
    )
    swarm = run_pso(track, image, [], cfg, np.random.default_rng(0))
    assert swarm.trace[0] < swarm.trace[1]
    assert swarm.gbest_state == target


def test_seeded_global_best_is_motion_prediction() -> None:
    image, target = _scene()
    cfg = TrackerConfig(variant=Variant.PSO, particles=1, pso_iters=1)
    far = Particle(BBox(20, 20, 24, 32), Velocity4(), BBox(20, 20, 24, 32))
    track = replace(
        _track(image, target),
        state=replace(target, u=target.u - 4),
        vel=Velocity4(4, 0, 0, 0),
        particles=(far,),
    )
    swarm = run_pso(track, image, [], cfg, np.random.default_rng(0))
    assert swarm.gbest_state == target
    assert swarm.particles[0].fitness < swarm.gbest_fitness


def test_velocity_update_respects_cap() -> None:
    cfg = TrackerConfig(variant=Variant.PSO)
    rng = np.random.default_rng(3)
    for _ in range(1000):
        state = BBox(*rng.uniform(10, 200, 2), *rng.uniform(2, 60, 2))
        v_max = configured_bounds(state, cfg).v_max
        positions = rng.normal(0, 200, (6, 4))
        velocities = velocity_update(
            rng.normal(0, 100, (6, 4)),
            positions,
            positions + rng.normal(0, 200, (6, 4)),
            rng.normal(0, 200, 4),
            v_max,
            rng,
            cfg,
        )
        assert np.all(np.abs(velocities) <= v_max)


def _particles(*fitness: float) -> list[Particle]:
    particles = []
    for k, f in enumerate(fitness):
        box = BBox(10 * k + 5, 5, 4, 4)
        particles.append(Particle(box, Velocity4(), box, pbest_fitness=f, fitness=f))
    return particles


GBEST = (BBox(50, 50, 4, 4), 0.9)


def test_resample_none_is_identity() -> None:
    particles = _particles(0.1, 0.5)
    assert resample(particles, GBEST, ResampleMode.NONE, 0.2) == particles


def test_resample_discard_keeps_fit_particles() -> None:
    particles = _particles(0.1, 0.5, 0.2)
    assert resample(particles, GBEST, ResampleMode.DISCARD, 0.2) == particles[1:]


def test_resample_discard_keeps_best_when_none_qualify() -> None:
    particles = _particles(0.1, 0.15, 0.05)
    assert resample(particles, GBEST, ResampleMode.DISCARD, 0.2) == [particles[1]]


def test_resample_replace_with_global() -> None:
    particles = _particles(0.1, 0.5)
    out = resample(particles, GBEST, ResampleMode.REPLACE_WITH_GLOBAL, 0.2)
    assert len(out) == 2
    assert out[1] == particles[1]
    assert out[0].state == out[0].pbest_state == GBEST[0]
    assert out[0].fitness == out[0].pbest_fitness == 0.9
