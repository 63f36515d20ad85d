from typing import NamedTuple

import numpy as np

from ._config import TrackerConfig
from ._models import BBox, Velocity4, diagonal

MIN_SIZE = 1.0


class MotionBounds(NamedTuple):
    ux_max: np.ndarray  # Position perturbation bound per coordinate.
    uv_max: np.ndarray  # Velocity perturbation bound per coordinate.
    v_max: np.ndarray  # Velocity cap per coordinate.

    @property
    def social_speed_cap(self) -> float:
        return float(np.hypot(*(self.v_max[:2] + self.uv_max[:2])))


def bounds_for(
    state: BBox,
    *,
    position_noise: float = 0.5,
    velocity_noise: float = 0.25,
    velocity_cap: float = 0.5,
    size_velocity_cap: float = 0.25,
) -> MotionBounds:
    size = np.array([state.w, state.h, state.w, state.h], dtype=np.float64)
    planar_cap = velocity_cap * diagonal(state)
    v_max = np.array(
        [
            planar_cap,
            planar_cap,
            size_velocity_cap * state.w,
            size_velocity_cap * state.h,
        ]
    )
    return MotionBounds(
        ux_max=position_noise * size,
        uv_max=velocity_noise * size,
        v_max=v_max,
    )


def configured_bounds(state: BBox, cfg: TrackerConfig) -> MotionBounds:
    return bounds_for(
        state,
        position_noise=cfg.position_noise,
        velocity_noise=cfg.velocity_noise,
        velocity_cap=cfg.velocity_cap,
        size_velocity_cap=cfg.size_velocity_cap,
    )


def configured_propagate(
    state: BBox,
    vel: Velocity4,
    bounds: MotionBounds,
    rng: np.random.Generator,
    cfg: TrackerConfig,
) -> tuple[BBox, Velocity4]:
    return propagate(
        state,
        vel,
        bounds,
        rng,
        eps_x=cfg.eps_x,
        eps_v=cfg.eps_v,
        lambda_x=cfg.lambda_x,
        lambda_v=cfg.lambda_v,
    )


def floor_size(values: np.ndarray) -> np.ndarray:
    values = values.copy()
    values[2:] = np.maximum(values[2:], MIN_SIZE)
    return values


def propagate(
    state: BBox,
    vel: Velocity4,
    bounds: MotionBounds,
    rng: np.random.Generator,
    *,
    eps_x: float = 1.0,
    eps_v: float = 1.0,
    lambda_x: float = 1.0,
    lambda_v: float = 1.0,
) -> tuple[BBox, Velocity4]:
    """
    Random motion model step.

        V' = clip(V + eps_v * U_V, -v_max, v_max)
        X' = X + lambda_v * V' + lambda_x * eps_x * U_X

    with `U_V`, `U_X` drawn uniformly within the bounds, per coordinate.
    """
    u_v = rng.uniform(-bounds.uv_max, bounds.uv_max)
    u_x = rng.uniform(-bounds.ux_max, bounds.ux_max)

    v_next = np.clip(vel.as_array() + eps_v * u_v, -bounds.v_max, bounds.v_max)
    x_next = state.as_array() + lambda_v * v_next + lambda_x * eps_x * u_x

    return BBox.from_array(floor_size(x_next)), Velocity4.from_array(v_next)
