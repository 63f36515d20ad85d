import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Any, Optional

from ._exceptions import ConfigError, ConfigErrors

WEIGHT_TOLERANCE = 1e-9


class Variant(Enum):
    BASIC = "basic"
    PSO = "pso"
    PSO_SOCIAL = "pso_social"


class ResampleMode(Enum):
    DISCARD = "discard"
    REPLACE_WITH_GLOBAL = "replace_with_global"
    NONE = "none"


class InitMode(Enum):
    FROM_OPTIMUM = "from_optimum"
    FROM_PARTICLES = "from_particles"


DEFAULT_PARTICLES = {Variant.BASIC: 8, Variant.PSO: 6, Variant.PSO_SOCIAL: 6}

DEFAULT_FITNESS_WEIGHTS = {
    Variant.BASIC: (0.6, 0.4, 0.0),
    Variant.PSO: (0.6, 0.4, 0.0),
    Variant.PSO_SOCIAL: (0.5, 0.3, 0.2),
}


@dataclass(frozen=True)
class TrackerConfig:
    variant: Variant = Variant.PSO_SOCIAL
    particles: Optional[int] = None
    pso_iters: int = 4
    inertia: float = 0.7
    phi_p: float = 1.5
    phi_g: float = 1.5
    # Association cost.
    lambda_p: float = 0.6
    lambda_d: float = 0.2
    lambda_h: float = 0.2
    # Pair fitness.
    lambda_s: float = 0.5
    lambda_m: float = 0.5
    # Fitness composition; `None` picks the per-variant defaults.
    sigma_h: Optional[float] = None
    sigma_p: Optional[float] = None
    sigma_i: Optional[float] = None
    xi_p: float = 0.5
    xi_v: float = 0.5
    # Track history.
    rho_max: float = 1.0
    rho_re: float = 0.8
    max_age: int = 30
    sigma_0: float = 0.2
    sigma_s: float = 0.1
    # Motion model.
    eps_x: float = 1.0
    eps_v: float = 1.0
    lambda_x: float = 1.0
    lambda_v: float = 1.0
    position_noise: float = 0.5
    velocity_noise: float = 0.25
    velocity_cap: float = 0.5
    size_velocity_cap: float = 0.25
    gate_cost: float = 0.95
    resample_mode: ResampleMode = ResampleMode.REPLACE_WITH_GLOBAL
    init_mode: InitMode = InitMode.FROM_OPTIMUM
    entrance_margin: Optional[float] = None
    report_weak_age: int = 2
    workers: int = 1
    seed: int = 0

    @property
    def swarm_size(self) -> int:
        if self.particles is not None:
            return self.particles
        return DEFAULT_PARTICLES[self.variant]

    @property
    def social(self) -> bool:
        return self.variant is Variant.PSO_SOCIAL

    @property
    def fitness_weights(self) -> tuple[float, float, float]:
        """
        Return `(sigma_h, sigma_p, sigma_i)` for the configured variant.

        Only the PSO-Social variant carries a social weight.
        """
        default_h, default_p, default_i = DEFAULT_FITNESS_WEIGHTS[self.variant]
        if self.sigma_h is None and self.sigma_p is None and self.sigma_i is None:
            return (default_h, default_p, default_i)
        sigma_h = self.sigma_h if self.sigma_h is not None else default_h
        sigma_p = self.sigma_p if self.sigma_p is not None else default_p
        sigma_i = self.sigma_i if self.sigma_i is not None else default_i
        if not self.social:
            sigma_i = 0.0
        return (sigma_h, sigma_p, sigma_i)

    def margin_for(self, width: int, height: int) -> float:
        if self.entrance_margin is not None:
            return self.entrance_margin
        return 0.05 * min(width, height)

    def with_overrides(self, **overrides: Any) -> "TrackerConfig":
        return replace(self, **overrides)

    def validate(self) -> None:
        errors: list[ConfigError] = []

        def check(key: str, ok: bool, message: str) -> None:
            if not ok:
                errors.append(ConfigError(key, message))

        def check_sum(keys: tuple[str, ...], values: tuple[float, ...]) -> None:
            total = sum(values)
            if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=WEIGHT_TOLERANCE):
                joined = " + ".join(keys)
                message = f"{joined} must be 1, got {total:g}"
                errors.append(ConfigError(keys[0], message))

        check_sum(
            ("lambda_p", "lambda_d", "lambda_h"),
            (self.lambda_p, self.lambda_d, self.lambda_h),
        )
        check_sum(("lambda_s", "lambda_m"), (self.lambda_s, self.lambda_m))
        check_sum(("xi_p", "xi_v"), (self.xi_p, self.xi_v))

        sigma_h, sigma_p, sigma_i = self.fitness_weights
        if self.social:
            check_sum(("sigma_h", "sigma_p", "sigma_i"), (sigma_h, sigma_p, sigma_i))
        elif self.variant is Variant.PSO:
            check_sum(("sigma_h", "sigma_p"), (sigma_h, sigma_p))

        weights = {
            "lambda_p": self.lambda_p,
            "lambda_d": self.lambda_d,
            "lambda_h": self.lambda_h,
            "lambda_s": self.lambda_s,
            "lambda_m": self.lambda_m,
            "xi_p": self.xi_p,
            "xi_v": self.xi_v,
            "sigma_h": sigma_h,
            "sigma_p": sigma_p,
            "sigma_i": sigma_i,
        }
        for key, value in weights.items():
            check(key, value >= 0, f"weight must be non-negative, got {value:g}")

        check("inertia", 0 < self.inertia < 1, "must lie in (0, 1)")
        check("phi_p", 1 < self.phi_p < 3, "must lie in (1, 3)")
        check("phi_g", 1 < self.phi_g < 3, "must lie in (1, 3)")
        check("rho_max", self.rho_max == 1.0, "is fixed to 1")
        check("rho_re", 0 <= self.rho_re <= 1, "must lie in [0, 1]")
        check("sigma_0", 0 <= self.sigma_0 <= 1, "must lie in [0, 1]")
        check("sigma_s", self.sigma_s >= 0, "must be non-negative")
        check("gate_cost", 0 <= self.gate_cost <= 1, "must lie in [0, 1]")
        check("max_age", self.max_age >= 1, "must be at least 1")
        check("pso_iters", self.pso_iters >= 1, "must be at least 1")
        check("particles", self.swarm_size >= 1, "must be at least 1")
        check("workers", self.workers >= 1, "must be at least 1")
        check("report_weak_age", self.report_weak_age >= 0, "must be non-negative")
        check("seed", 0 <= self.seed < 2 ** 64, "must be an unsigned 64-bit integer")
        for key in (
            "position_noise",
            "velocity_noise",
            "velocity_cap",
            "size_velocity_cap",
        ):
            check(key, getattr(self, key) > 0, "must be positive")
        for key in ("eps_x", "eps_v", "lambda_x", "lambda_v"):
            check(key, getattr(self, key) >= 0, "must be non-negative")
        if self.entrance_margin is not None:
            check("entrance_margin", self.entrance_margin >= 0, "must be non-negative")

        if errors:
            raise ConfigErrors(errors)


FIELD_TYPES: dict[str, Any] = {f.name: f.type for f in fields(TrackerConfig)}
