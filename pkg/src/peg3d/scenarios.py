"""Scenario presets, random obstacle layouts, and INI config files.

A scenario fixes the start positions and the obstacle specification; training
and reward hyperparameters live in :class:`TrainConfig`.  Config files are
flat key-value INI with one section per parameter group; every value has a
default, so a config file only needs the keys it overrides.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .env import Arena, AgentState, Obstacle
from .reward import RewardConfig

__all__ = [
    "CONFIG_SCHEMA",
    "LearnerConfig",
    "TrainConfig",
    "Scenario",
    "builtin_scenarios",
    "place_obstacles",
    "realize_obstacles",
    "initial_states",
    "build_arena",
    "load_config",
    "scenario_from_dict",
    "train_config_from_dict",
]

CONFIG_SCHEMA = "peg3d.config.v1"


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters shared by both agents' learners."""

    alpha_actor: float = 0.001
    alpha_critic: float = 0.05
    gamma: float = 0.95
    sigma: float = 0.1
    mfs_per_input: int = 5
    distance_domain: tuple[float, float] = (0.0, 35.0)
    angle_domain: tuple[float, float] = (-math.pi, math.pi)


@dataclass
class TrainConfig:
    """Everything a training run needs besides the scenario."""

    episodes: int = 200
    max_plays: int = 1000
    dt: float = 0.1
    seed: int = 0
    capture_distance: float = 1.0
    max_time: float = 100.0
    pursuer_speed: float = 1.1
    evader_speed: float = 1.0
    steering_mode: str = "incremental"
    arena_extents: tuple[float, float, float] = (35.0, 35.0, 20.0)
    sensing_range: float = 35.0
    cone_constraint: bool = True
    freeze: str = "none"  # none | pursuer | evader
    log_steps: str = "final"  # none | final | all
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.max_plays < 1:
            raise ValueError("max_plays must be >= 1")
        if self.freeze not in ("none", "pursuer", "evader"):
            raise ValueError(f"freeze must be none|pursuer|evader, got {self.freeze!r}")
        if self.log_steps not in ("none", "final", "all"):
            raise ValueError(f"log_steps must be none|final|all, got {self.log_steps!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Scenario:
    """Start positions plus an obstacle specification.

    ``obstacles`` holds explicit spheres as ``(x, y, z, radius)`` rows; when
    ``None``, each episode draws ``obstacle_count`` spheres uniformly inside
    the arena, rejecting any whose surface comes within ``obstacle_margin``
    of either start.  Headings default to the chase axis: the pursuer starts
    facing the evader and the evader facing directly away.
    """

    name: str
    pursuer_start: tuple[float, float, float]
    evader_start: tuple[float, float, float]
    obstacles: tuple[tuple[float, float, float, float], ...] | None = None
    obstacle_count: int = 3
    obstacle_radius: float = 1.0
    obstacle_margin: float = 3.0
    pursuer_heading: tuple[float, float] | None = None  # (alpha, theta)
    evader_heading: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def builtin_scenarios() -> dict[int, Scenario]:
    """The four standard start configurations, numbered 1..4."""
    starts = [
        ((5.0, 30.0, 0.0), (5.0, 5.0, 0.0)),
        ((5.0, 5.0, 0.0), (30.0, 30.0, 0.0)),
        ((30.0, 30.0, 0.0), (30.0, 5.0, 0.0)),
        ((30.0, 30.0, 0.0), (5.0, 30.0, 0.0)),
    ]
    return {
        i + 1: Scenario(name=f"scenario-{i + 1}", pursuer_start=p, evader_start=e)
        for i, (p, e) in enumerate(starts)
    }


def place_obstacles(
    rng: np.random.Generator,
    extents: tuple[float, float, float],
    count: int,
    radius: float,
    keepout_points,
    margin: float = 3.0,
    max_attempts: int = 10_000,
) -> list[Obstacle]:
    """Sample obstacle centers uniformly inside the arena.

    A placement is rejected when the sphere surface comes within ``margin``
    of any keepout point (the agents' starts), or would poke out of the box.
    """
    keepout = [tuple(map(float, p)) for p in keepout_points]
    low = np.array([radius, radius, radius])
    high = np.asarray(extents, dtype=float) - radius
    if np.any(low > high):
        raise ValueError("obstacle radius exceeds arena half-extent")
    obstacles: list[Obstacle] = []
    for _ in range(count):
        for _ in range(max_attempts):
            center = tuple(rng.uniform(low, high).tolist())
            if all(math.dist(center, p) - radius >= margin for p in keepout):
                obstacles.append(Obstacle(center=center, radius=radius))
                break
        else:
            raise RuntimeError("could not place obstacle clear of the start positions")
    return obstacles


def realize_obstacles(
    scenario: Scenario, config: TrainConfig, rng: np.random.Generator | None
) -> list[Obstacle]:
    """Explicit obstacle list, or a fresh random layout drawn from ``rng``."""
    if scenario.obstacles is not None:
        return [
            Obstacle(center=tuple(float(v) for v in row[:3]), radius=float(row[3]))
            for row in scenario.obstacles
        ]
    if scenario.obstacle_count == 0:
        return []
    if rng is None:
        raise ValueError("random obstacle layout requested but no RNG supplied")
    return place_obstacles(
        rng,
        config.arena_extents,
        scenario.obstacle_count,
        scenario.obstacle_radius,
        keepout_points=[scenario.pursuer_start, scenario.evader_start],
        margin=scenario.obstacle_margin,
    )


def build_arena(scenario: Scenario, config: TrainConfig, obstacles) -> Arena:
    return Arena(
        extents=config.arena_extents,
        obstacles=list(obstacles),
        capture_distance=config.capture_distance,
        max_time=config.max_time,
        dt=config.dt,
        steering_mode=config.steering_mode,
        sensing_range=config.sensing_range,
    )


def _chase_axis_heading(pursuer_start, evader_start) -> tuple[float, float]:
    d = np.asarray(evader_start, dtype=float) - np.asarray(pursuer_start, dtype=float)
    n = float(np.linalg.norm(d))
    if n < 1e-12:
        return 0.0, math.pi / 2.0
    return math.atan2(d[1], d[0]), math.acos(max(-1.0, min(1.0, d[2] / n)))


def initial_states(scenario: Scenario, config: TrainConfig) -> tuple[AgentState, AgentState]:
    """Starting states for both agents.

    Unless the scenario pins headings explicitly, both agents start aligned
    with the chase axis: the pursuer faces the evader, the evader faces away
    from the pursuer (the same direction vector, seen from each end).
    """
    auto = _chase_axis_heading(scenario.pursuer_start, scenario.evader_start)
    p_alpha, p_theta = scenario.pursuer_heading or auto
    e_alpha, e_theta = scenario.evader_heading or auto
    pursuer = AgentState(
        position=tuple(map(float, scenario.pursuer_start)),
        alpha=p_alpha,
        theta=p_theta,
        speed=config.pursuer_speed,
    )
    evader = AgentState(
        position=tuple(map(float, scenario.evader_start)),
        alpha=e_alpha,
        theta=e_theta,
        speed=config.evader_speed,
    )
    return pursuer, evader


# --- INI config files -------------------------------------------------------

def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _parse_obstacle_rows(text: str) -> tuple[tuple[float, float, float, float], ...]:
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = _parse_floats(chunk)
        if len(vals) != 4:
            raise ValueError(f"obstacle row needs 'x y z radius', got {chunk!r}")
        rows.append(vals)
    return tuple(rows)


def _get(parser, section, key, cast, current):
    if parser.has_option(section, key):
        return cast(parser.get(section, key))
    return current


def load_config(path) -> tuple[TrainConfig, Scenario | None]:
    """Read an INI config file; returns the run config and an optional scenario.

    Only a ``[scenario]`` section produces a scenario; otherwise the caller
    picks one of the built-ins.  Unknown keys raise so typos do not silently
    fall back to defaults.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with open(path) as fh:
        parser.read_file(fh)

    known = {
        "config": {"schema"},
        "train": {"episodes", "max_plays", "seed", "freeze", "log_steps"},
        "arena": {
            "extents",
            "dt",
            "capture_distance",
            "max_time",
            "steering_mode",
            "sensing_range",
        },
        "agents": {"pursuer_speed", "evader_speed", "cone_constraint"},
        "learner": {"alpha_actor", "alpha_critic", "gamma", "sigma", "mfs_per_input"},
        "reward": {
            "repulsion_coeff",
            "attraction_coeff",
            "success_coeff",
            "repulsion_weight",
            "attraction_weight",
        },
        "scenario": {
            "name",
            "pursuer_start",
            "evader_start",
            "obstacles",
            "obstacle_count",
            "obstacle_radius",
            "obstacle_margin",
            "pursuer_heading",
            "evader_heading",
        },
    }
    for section in parser.sections():
        if section not in known:
            raise ValueError(f"unknown config section [{section}] in {path}")
        for key in parser.options(section):
            if key not in known[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}] of {path}")

    if parser.has_option("config", "schema"):
        schema = parser.get("config", "schema")
        if schema != CONFIG_SCHEMA:
            raise ValueError(f"unsupported config schema {schema!r} (expected {CONFIG_SCHEMA})")

    defaults = TrainConfig()
    learner = LearnerConfig(
        alpha_actor=_get(parser, "learner", "alpha_actor", float, defaults.learner.alpha_actor),
        alpha_critic=_get(parser, "learner", "alpha_critic", float, defaults.learner.alpha_critic),
        gamma=_get(parser, "learner", "gamma", float, defaults.learner.gamma),
        sigma=_get(parser, "learner", "sigma", float, defaults.learner.sigma),
        mfs_per_input=_get(parser, "learner", "mfs_per_input", int, defaults.learner.mfs_per_input),
    )
    reward = RewardConfig(
        repulsion_coeff=_get(parser, "reward", "repulsion_coeff", float, 10.0),
        attraction_coeff=_get(parser, "reward", "attraction_coeff", float, 5.0),
        success_coeff=_get(parser, "reward", "success_coeff", float, 20.0),
        repulsion_weight=_get(parser, "reward", "repulsion_weight", float, 5.0),
        attraction_weight=_get(parser, "reward", "attraction_weight", float, 10.0),
    )
    config = TrainConfig(
        episodes=_get(parser, "train", "episodes", int, defaults.episodes),
        max_plays=_get(parser, "train", "max_plays", int, defaults.max_plays),
        seed=_get(parser, "train", "seed", int, defaults.seed),
        freeze=_get(parser, "train", "freeze", str, defaults.freeze),
        log_steps=_get(parser, "train", "log_steps", str, defaults.log_steps),
        dt=_get(parser, "arena", "dt", float, defaults.dt),
        capture_distance=_get(
            parser, "arena", "capture_distance", float, defaults.capture_distance
        ),
        max_time=_get(parser, "arena", "max_time", float, defaults.max_time),
        steering_mode=_get(parser, "arena", "steering_mode", str, defaults.steering_mode),
        sensing_range=_get(parser, "arena", "sensing_range", float, defaults.sensing_range),
        arena_extents=_get(parser, "arena", "extents", _parse_floats, defaults.arena_extents),
        pursuer_speed=_get(parser, "agents", "pursuer_speed", float, defaults.pursuer_speed),
        evader_speed=_get(parser, "agents", "evader_speed", float, defaults.evader_speed),
        cone_constraint=_get(parser, "agents", "cone_constraint", _parse_bool, defaults.cone_constraint),
        learner=learner,
        reward=reward,
    )

    scenario = None
    if parser.has_section("scenario"):
        if not (
            parser.has_option("scenario", "pursuer_start")
            and parser.has_option("scenario", "evader_start")
        ):
            raise ValueError("[scenario] needs pursuer_start and evader_start")
        heading = lambda key: (
            _parse_floats(parser.get("scenario", key))
            if parser.has_option("scenario", key)
            else None
        )
        scenario = Scenario(
            name=_get(parser, "scenario", "name", str, "custom"),
            pursuer_start=_parse_floats(parser.get("scenario", "pursuer_start")),
            evader_start=_parse_floats(parser.get("scenario", "evader_start")),
            obstacles=(
                _parse_obstacle_rows(parser.get("scenario", "obstacles"))
                if parser.has_option("scenario", "obstacles")
                else None
            ),
            obstacle_count=_get(parser, "scenario", "obstacle_count", int, 3),
            obstacle_radius=_get(parser, "scenario", "obstacle_radius", float, 1.0),
            obstacle_margin=_get(parser, "scenario", "obstacle_margin", float, 3.0),
            pursuer_heading=heading("pursuer_heading"),
            evader_heading=heading("evader_heading"),
        )
    return config, scenario


def scenario_from_dict(data: dict) -> Scenario:
    obstacles = data.get("obstacles")
    return Scenario(
        name=data["name"],
        pursuer_start=tuple(data["pursuer_start"]),
        evader_start=tuple(data["evader_start"]),
        obstacles=(
            tuple(tuple(row) for row in obstacles) if obstacles is not None else None
        ),
        obstacle_count=int(data.get("obstacle_count", 3)),
        obstacle_radius=float(data.get("obstacle_radius", 1.0)),
        obstacle_margin=float(data.get("obstacle_margin", 3.0)),
        pursuer_heading=(
            tuple(data["pursuer_heading"]) if data.get("pursuer_heading") else None
        ),
        evader_heading=(
            tuple(data["evader_heading"]) if data.get("evader_heading") else None
        ),
    )


def train_config_from_dict(data: dict) -> TrainConfig:
    data = dict(data)
    learner = dict(data.pop("learner"))
    reward = dict(data.pop("reward"))
    learner["distance_domain"] = tuple(learner["distance_domain"])
    learner["angle_domain"] = tuple(learner["angle_domain"])
    data["arena_extents"] = tuple(data["arena_extents"])
    return TrainConfig(**data, learner=LearnerConfig(**learner), reward=RewardConfig(**reward))
