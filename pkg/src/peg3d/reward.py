"""Potential-field shaping rewards.

Obstacles repel: moving away from the nearest obstacle earns a bounded
positive reward, moving closer an unbounded penalty.  The chase axis
attracts: the pursuer is paid for closing the separation and the evader for
growing it (attraction and the terminal capture bonus flip sign for the
evader; the obstacle term keeps the same form for both roles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PURSUER",
    "EVADER",
    "RewardConfig",
    "repulsion_reward",
    "attraction_reward",
    "success_reward",
    "total_reward",
]

PURSUER = "pursuer"
EVADER = "evader"
_ROLES = (PURSUER, EVADER)


@dataclass(frozen=True)
class RewardConfig:
    """Coefficients of the shaping terms and their balance weights."""

    repulsion_coeff: float = 10.0
    attraction_coeff: float = 5.0
    success_coeff: float = 20.0
    repulsion_weight: float = 5.0
    attraction_weight: float = 10.0

    def __post_init__(self):
        for name in (
            "repulsion_coeff",
            "attraction_coeff",
            "success_coeff",
            "repulsion_weight",
            "attraction_weight",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


def _check_role(role: str):
    if role not in _ROLES:
        raise ValueError(f"role must be one of {_ROLES}, got {role!r}")


def repulsion_reward(d_prev: float, d_next: float, cfg: RewardConfig) -> float:
    """Reward for the change in signed surface distance to the nearest obstacle.

    Zero when the distance is unchanged, approaching 1 as the agent retreats,
    exponentially negative as it advances on the obstacle.  Same form for
    both roles.
    """
    return 1.0 - math.exp(-cfg.repulsion_coeff * (d_next - d_prev))


def attraction_reward(d_prev: float, d_next: float, role: str, cfg: RewardConfig) -> float:
    """Reward for the change in pursuer-evader separation.

    Positive for the pursuer when the gap shrinks; the evader gets the
    negated value.
    """
    _check_role(role)
    r = math.exp(-cfg.attraction_coeff * (d_next - d_prev)) - 1.0
    return r if role == PURSUER else -r


def success_reward(captured: bool, role: str, cfg: RewardConfig) -> float:
    """Terminal capture bonus: positive for the pursuer, negated for the evader."""
    _check_role(role)
    if not captured:
        return 0.0
    return cfg.success_coeff if role == PURSUER else -cfg.success_coeff


def total_reward(
    d_obstacle_prev: float,
    d_obstacle_next: float,
    d_opponent_prev: float,
    d_opponent_next: float,
    captured: bool,
    role: str,
    cfg: RewardConfig,
) -> float:
    """Weighted balance of repulsion and attraction plus the capture bonus."""
    return (
        cfg.repulsion_weight * repulsion_reward(d_obstacle_prev, d_obstacle_next, cfg)
        + cfg.attraction_weight * attraction_reward(d_opponent_prev, d_opponent_next, role, cfg)
        + success_reward(captured, role, cfg)
    )
