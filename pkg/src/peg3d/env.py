"""Box arena with fixed-step agent kinematics, spherical obstacles, and capture tests.

Agents move at constant speed along a persistent heading given by an azimuth
``alpha`` (angle in the x-y plane from the x-axis) and a polar angle ``theta``
(from the z-axis).  A step command turns the heading, then the agent advances
``speed * dt`` along it; positions are clipped to the arena box so agents
slide along walls instead of leaving the arena.

Positions are plain ``(x, y, z)`` tuples: the stepping functions sit in the
innermost simulation loop and scalar math beats tiny-array overhead there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "TURN_LIMIT",
    "RUNNING",
    "CAPTURED",
    "TIMEOUT",
    "AgentState",
    "Obstacle",
    "Arena",
    "StepCommand",
    "heading_vector",
    "wrap_angle",
    "step_agent",
    "cone_limited_command",
    "check_termination",
    "nearest_obstacle",
    "collision_check",
]

# Per-step steering limit on each command channel, radians.
TURN_LIMIT = math.pi / 4.0

RUNNING = "running"
CAPTURED = "captured"
TIMEOUT = "timeout"

_STEERING_MODES = ("incremental", "absolute")


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


def heading_vector(alpha: float, theta: float) -> tuple[float, float, float]:
    """Unit direction for azimuth ``alpha`` and polar angle ``theta``."""
    sin_theta = math.sin(theta)
    return (sin_theta * math.cos(alpha), sin_theta * math.sin(alpha), math.cos(theta))


@dataclass(frozen=True, slots=True)
class AgentState:
    """Position, persistent heading angles, and constant speed of one agent."""

    position: tuple[float, float, float]
    alpha: float
    theta: float
    speed: float


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Spherical obstacle."""

    center: tuple[float, float, float]
    radius: float

    def surface_distance(self, pos) -> float:
        """Signed distance from ``pos`` to the obstacle surface (negative inside)."""
        return math.dist(pos, self.center) - self.radius


@dataclass
class Arena:
    """World configuration: box extents, obstacles, timing, and capture rule."""

    extents: tuple[float, float, float] = (35.0, 35.0, 20.0)
    obstacles: list[Obstacle] = field(default_factory=list)
    capture_distance: float = 1.0
    max_time: float = 100.0
    dt: float = 0.1
    steering_mode: str = "incremental"
    sensing_range: float = 35.0

    def __post_init__(self):
        if self.capture_distance <= 0.0:
            raise ValueError("capture_distance must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.steering_mode not in _STEERING_MODES:
            raise ValueError(f"steering_mode must be one of {_STEERING_MODES}")
        ex, ey, ez = self.extents
        for obs in self.obstacles:
            if obs.radius <= 0.0:
                raise ValueError("obstacle radius must be positive")
            cx, cy, cz = obs.center
            inside = (
                obs.radius <= cx <= ex - obs.radius
                and obs.radius <= cy <= ey - obs.radius
                and obs.radius <= cz <= ez - obs.radius
            )
            if not inside:
                raise ValueError(f"obstacle at {tuple(obs.center)} not fully inside arena")


@dataclass(slots=True)
class StepCommand:
    """Steering command; both channels are clamped to the turn limit on creation."""

    dalpha: float
    dtheta: float

    def __post_init__(self):
        self.dalpha = max(-TURN_LIMIT, min(TURN_LIMIT, self.dalpha))
        self.dtheta = max(-TURN_LIMIT, min(TURN_LIMIT, self.dtheta))


def step_agent(state: AgentState, cmd: StepCommand, dt: float, arena: Arena) -> AgentState:
    """Advance one agent by one time step.

    In the default ``incremental`` steering mode the command turns the
    persistent heading (azimuth wraps, polar clamps to [0, pi]); in
    ``absolute`` mode the command *is* the heading, each channel limited to
    the turn limit (a negative polar command is normalized by flipping the
    azimuth).  The agent then moves ``speed * dt`` along the heading and is
    clipped to the arena box.
    """
    if arena.steering_mode == "incremental":
        alpha = wrap_angle(state.alpha + cmd.dalpha)
        theta = state.theta + cmd.dtheta
        if theta < 0.0:
            theta = 0.0
        elif theta > math.pi:
            theta = math.pi
    else:
        alpha, theta = cmd.dalpha, cmd.dtheta
        if theta < 0.0:
            theta = -theta
            alpha = wrap_angle(alpha + math.pi)
    step = state.speed * dt
    sin_theta = math.sin(theta)
    x, y, z = state.position
    x += step * sin_theta * math.cos(alpha)
    y += step * sin_theta * math.sin(alpha)
    z += step * math.cos(theta)
    ex, ey, ez = arena.extents
    position = (
        ex if x > ex else (0.0 if x < 0.0 else x),
        ey if y > ey else (0.0 if y < 0.0 else y),
        ez if z > ez else (0.0 if z < 0.0 else z),
    )
    return AgentState(position=position, alpha=alpha, theta=theta, speed=state.speed)


def cone_limited_command(
    state: AgentState,
    dalpha: float,
    dtheta: float,
    target: tuple[float, float, float],
    max_offset: float,
) -> tuple[float, float]:
    """Restrict a steering command to a cone of directions around ``target``.

    If applying ``(dalpha, dtheta)`` would leave the heading within
    ``max_offset`` radians of the ``target`` direction, the command passes
    through (clamped to the turn limit).  Otherwise the command is replaced
    by the fastest legal turn toward ``target``, so the agent converges back
    into its motion envelope within a few steps.  Inputs and outputs are
    per-step heading increments.
    """
    tx, ty, tz = target
    t_norm = math.sqrt(tx * tx + ty * ty + tz * tz)
    if t_norm < 1e-12:
        return (
            max(-TURN_LIMIT, min(TURN_LIMIT, dalpha)),
            max(-TURN_LIMIT, min(TURN_LIMIT, dtheta)),
        )
    da = max(-TURN_LIMIT, min(TURN_LIMIT, dalpha))
    dth = max(-TURN_LIMIT, min(TURN_LIMIT, dtheta))
    alpha = wrap_angle(state.alpha + da)
    theta = state.theta + dth
    theta = 0.0 if theta < 0.0 else (math.pi if theta > math.pi else theta)
    hx, hy, hz = heading_vector(alpha, theta)
    cosine = (hx * tx + hy * ty + hz * tz) / t_norm
    if math.acos(max(-1.0, min(1.0, cosine))) <= max_offset:
        return da, dth
    horizontal = math.hypot(tx, ty)
    alpha_star = math.atan2(ty, tx) if horizontal > 1e-12 else state.alpha
    theta_star = math.atan2(horizontal, tz)
    da = max(-TURN_LIMIT, min(TURN_LIMIT, wrap_angle(alpha_star - state.alpha)))
    dth = max(-TURN_LIMIT, min(TURN_LIMIT, theta_star - state.theta))
    return da, dth


def check_termination(
    pursuer: AgentState, evader: AgentState, arena: Arena, elapsed: float
) -> str:
    """Episode outcome at the current instant.

    Capture (separation at or below the capture distance) takes precedence
    over a simultaneous timeout (elapsed strictly above the time budget).
    """
    if math.dist(pursuer.position, evader.position) <= arena.capture_distance:
        return CAPTURED
    if elapsed > arena.max_time:
        return TIMEOUT
    return RUNNING


def nearest_obstacle(pos, arena: Arena) -> tuple[Obstacle | None, float]:
    """Closest obstacle to ``pos`` and its signed surface distance.

    With no obstacles returns ``(None, sensing_range)`` so downstream
    consumers see a far, inert sentinel.
    """
    best = None
    best_dist = arena.sensing_range
    for obs in arena.obstacles:
        dist = math.dist(pos, obs.center) - obs.radius
        if best is None or dist < best_dist:
            best = obs
            best_dist = dist
    return best, best_dist


def collision_check(pos, arena: Arena) -> bool:
    """True when ``pos`` lies strictly inside any obstacle."""
    _, dist = nearest_obstacle(pos, arena)
    return dist < 0.0
