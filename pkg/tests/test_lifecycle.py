import math
from dataclasses import replace
from typing import Any

import numpy as np
import pytest

from gentrack._appearance import zero_features
from gentrack._config import TrackerConfig
from gentrack._lifecycle import (
    in_entrance_area,
    neighbor_search,
    prune,
    smooth_velocity,
    spawn,
    update_matched,
    update_weak_basic,
    update_weak_pso,
    update_weak_social,
)
from gentrack._models import (
    BBox,
    Detection,
    Track,
    TrackStatus,
    Velocity4,
    center_distance,
    diagonal,
)
from gentrack._pso import SwarmResult

IMAGE = np.zeros((100, 100), dtype=np.uint8)


def _track(
    state: BBox = BBox(50, 50, 10, 10), vel: Velocity4 = Velocity4(), **kwargs: Any
) -> Track:
    return Track(0, state, vel, zero_features(), **kwargs)


def _swarm(gbest: BBox, f_g: float) -> SwarmResult:
    return SwarmResult(
        particles=(), gbest_state=gbest, gbest_fitness=f_g, gbest_history_fitness=f_g
    )


@pytest.mark.parametrize(
    "now, prev, expected",
    [
        (Velocity4(4, 0, 0, 0), Velocity4(), Velocity4(2, 0, 0, 0)),
        (Velocity4(2, 2, 2, 2), Velocity4(2, 2, 2, 2), Velocity4(2, 2, 2, 2)),
        (Velocity4(1, -3, 0, 0), Velocity4(-1, 3, 0, 0), Velocity4()),
    ],
)
def test_smooth_velocity(now: Velocity4, prev: Velocity4, expected: Velocity4) -> None:
    assert smooth_velocity(now, prev) == expected


def test_update_matched() -> None:
    track = _track(penalty=0.4, age=3, status=TrackStatus.WEAK, recovering=True)
    det = Detection(BBox(54, 50, 10, 10), 0.9)
    matched = update_matched(track, det, IMAGE)
    assert matched.state == det.bbox
    assert matched.vel == Velocity4(2, 0, 0, 0)
    assert (matched.penalty, matched.age) == (0.0, 0)
    assert matched.status is TrackStatus.STRONG
    assert not matched.recovering


def test_update_matched_caps_velocity() -> None:
    det = Detection(BBox(90, 50, 10, 10))
    matched = update_matched(_track(), det, IMAGE)
    assert matched.vel.du == pytest.approx(0.5 * diagonal(det.bbox))


def test_spawn() -> None:
    track = spawn(Detection(BBox(20, 20, 8, 8)), 7, IMAGE)
    assert track.id == 7
    assert track.status is TrackStatus.NEW
    assert (track.penalty, track.age) == (0.0, 0)
    assert track.vel == Velocity4()


def test_update_weak_basic() -> None:
    weak = update_weak_basic(_track(vel=Velocity4(1, 2, 0, 0)), TrackerConfig())
    assert weak.state == BBox(51, 52, 10, 10)
    assert weak.penalty == pytest.approx(1 / 30)
    assert weak.age == 1
    assert weak.status is TrackStatus.WEAK


def test_update_weak_basic_caps_penalty() -> None:
    weak = update_weak_basic(_track(penalty=0.99), TrackerConfig())
    assert weak.penalty == 1.0


def test_update_weak_pso_recovers_on_good_fitness() -> None:
    track = _track(vel=Velocity4(1, 0, 0, 0), penalty=0.5, age=5)
    gbest = BBox(51, 50, 10, 10)
    weak = update_weak_pso(track, _swarm(gbest, 1.0), TrackerConfig())
    assert weak.state == BBox(51, 50, 10, 10)
    assert weak.vel == Velocity4(1, 0, 0, 0)
    assert weak.penalty == pytest.approx(0.5 - 1 / 30)
    assert weak.age == 4
    assert weak.recovering
    assert weak.last_global_best == (gbest, 1.0)
    assert weak.status is TrackStatus.WEAK


def test_update_weak_pso_degrades_on_poor_fitness() -> None:
    track = _track(penalty=0.5, age=5)
    weak = update_weak_pso(track, _swarm(track.state, 0.0), TrackerConfig())
    assert weak.penalty == pytest.approx(0.5 + 2 / 30)
    assert weak.age == 6
    assert not weak.recovering


def test_update_weak_pso_neutral_fitness_keeps_history() -> None:
    track = _track(penalty=0.5, age=5)
    weak = update_weak_pso(track, _swarm(track.state, 0.5), TrackerConfig(rho_re=0.5))
    assert weak.penalty == 0.5
    assert weak.age == 5
    assert not weak.recovering


def test_update_weak_pso_floors_penalty_and_age() -> None:
    track = _track(penalty=0.01, age=0)
    weak = update_weak_pso(track, _swarm(track.state, 1.0), TrackerConfig())
    assert weak.penalty == 0.0
    assert weak.age == 0


def test_update_weak_pso_holds_size() -> None:
    track = _track(vel=Velocity4(1, 0, 2, 2))
    weak = update_weak_pso(track, _swarm(BBox(51, 50, 14, 14), 0.9), TrackerConfig())
    assert weak.state == BBox(51, 50, 10, 10)
    assert weak.vel == Velocity4(1, 0, 1, 1)

    for _ in range(10):
        weak = update_weak_pso(weak, _swarm(weak.state, 0.9), TrackerConfig())
    assert (weak.state.w, weak.state.h) == (10, 10)
    assert abs(weak.vel.dw) < 1e-2 and abs(weak.vel.dh) < 1e-2


def test_update_weak_social_without_neighbors_matches_pso() -> None:
    track = _track(vel=Velocity4(1, 0, 0, 0), penalty=0.2, age=2)
    swarm = _swarm(BBox(51, 50, 10, 10), 0.3)
    cfg = TrackerConfig()
    assert update_weak_social(track, swarm, [], cfg) == update_weak_pso(
        track, swarm, cfg
    )


def test_update_weak_social_without_motion_only_relaxes_size() -> None:
    track = _track()
    neighbor = (BBox(70, 70, 20, 30), Velocity4())
    weak = update_weak_social(track, _swarm(track.state, 0.3), [neighbor])
    assert (weak.state.u, weak.state.v) == (50, 50)
    assert weak.state.w == pytest.approx(11)
    assert weak.state.h == pytest.approx(12)


def test_update_weak_social_ignores_orthogonal_offset() -> None:
    track = _track(vel=Velocity4(2, 0, 0, 0))
    swarm = _swarm(track.state, 0.3)
    beside = (BBox(50, 60, 10, 10), Velocity4())
    weak = update_weak_social(track, swarm, [beside])
    assert weak.state == BBox(50, 50, 10, 10)


def test_update_weak_social_pulls_along_direction_of_travel() -> None:
    track = _track(vel=Velocity4(2, 0, 0, 0))
    swarm = _swarm(track.state, 0.3)
    ahead = (BBox(62, 53, 10, 10), Velocity4())
    weak = update_weak_social(track, swarm, [ahead])
    assert weak.state.u == pytest.approx(51.2)
    assert weak.state.v == pytest.approx(50)


def test_neighbor_search_uses_closed_ball() -> None:
    track = Track(0, BBox(0, 0, 3, 4), Velocity4(), zero_features())
    on_edge = Track(1, BBox(3, 4, 3, 4), Velocity4(), zero_features())
    outside = Track(2, BBox(3, 4.01, 3, 4), Velocity4(), zero_features())
    far = Track(3, BBox(6, 8, 3, 4), Velocity4(), zero_features())
    tracks = [track, on_edge, outside, far]

    assert neighbor_search(track, tracks) == [(on_edge.state, on_edge.vel)]
    expanded = neighbor_search(track, tracks, expanded=True)
    assert [state for state, _ in expanded] == [
        on_edge.state,
        outside.state,
        far.state,
    ]


def test_neighbor_search_matches_brute_force() -> None:
    rng = np.random.default_rng(9)
    tracks = []
    for i in range(30):
        state = BBox(*rng.uniform(0, 100, 2), *rng.uniform(4, 20, 2))
        tracks.append(Track(i, state, Velocity4(), zero_features()))
    for track in tracks:
        found = {state for state, _ in neighbor_search(track, tracks)}
        expected = {
            other.state
            for other in tracks
            if other.id != track.id
            and center_distance(track.state, other.state) <= diagonal(track.state)
        }
        assert found == expected


def test_prune_drops_tracks_at_max_age() -> None:
    cfg = TrackerConfig(max_age=30)
    young = replace(_track(age=29), id=1)
    old = replace(_track(age=30), id=2)
    assert prune([young, old], cfg) == [young]


def test_entrance_area() -> None:
    assert in_entrance_area(BBox(5, 50, 4, 4), 100, 100, 5)
    assert in_entrance_area(BBox(50, 96, 4, 4), 100, 100, 5)
    assert not in_entrance_area(BBox(50, 50, 4, 4), 100, 100, 5)


@pytest.mark.parametrize(
    "u, expected", [pytest.param(2, 15, id="border"), pytest.param(50, 30, id="inner")]
)
def test_weak_track_lifetime(u: float, expected: int) -> None:
    cfg = TrackerConfig(max_age=30)
    tracks = [_track(BBox(u, 50, 4, 4), status=TrackStatus.WEAK)]
    frames = 0
    while tracks:
        frames += 1
        tracks = prune([update_weak_basic(t, cfg) for t in tracks], cfg, (100, 100))
    assert frames == expected
    assert frames == math.ceil(cfg.max_age / (2 if u < 5 else 1))
