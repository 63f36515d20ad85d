import math
from typing import NamedTuple, Sequence

from ._appearance import FeatureVector, cosine_similarity
from ._config import Variant
from ._models import BBox, Velocity4, center_distance, diagonal

Neighbor = tuple[BBox, Velocity4]


class FitnessBreakdown(NamedTuple):
    f_history: float
    f_explore: float
    f_social: float
    combined: float


def motion_fitness(a: BBox, b: BBox) -> float:
    d_om = diagonal(a) + diagonal(b)
    return 1.0 - min(center_distance(a, b), d_om) / d_om


def pair_fitness(
    a: BBox,
    a_feat: FeatureVector,
    b: BBox,
    b_feat: FeatureVector,
    *,
    lambda_s: float = 0.5,
    lambda_m: float = 0.5,
) -> float:
    f_s = cosine_similarity(a_feat, b_feat)
    f_m = motion_fitness(a, b)
    return clip_unit(lambda_s * f_s + lambda_m * f_m)


def social_fitness(
    p_state: BBox,
    p_vel: Velocity4,
    neighbors: Sequence[Neighbor],
    eps_nei: float,
    v_s_max: float,
    *,
    xi_p: float = 0.5,
    xi_v: float = 0.5,
) -> float:
    if not neighbors:
        return 1.0

    position_range = 2.0 * eps_nei
    position_sum = 0.0
    velocity_sum = 0.0
    for state, vel in neighbors:
        distance = center_distance(p_state, state)
        position_sum += min(distance, position_range) / position_range
        gap = math.hypot(p_vel.du - vel.du, p_vel.dv - vel.dv)
        velocity_sum += min(gap, v_s_max) / v_s_max

    n = len(neighbors)
    return clip_unit(xi_p * position_sum / n + xi_v * velocity_sum / n)


def compose(
    f_history: float,
    f_explore: float,
    f_social: float,
    variant: Variant,
    weights: tuple[float, float, float],
) -> float:
    sigma_h, sigma_p, sigma_i = weights
    combined = sigma_h * f_history + sigma_p * f_explore
    if variant is Variant.PSO_SOCIAL:
        combined += sigma_i * f_social
    return clip_unit(combined)


def clip_unit(value: float) -> float:
    return min(1.0, max(0.0, value))
