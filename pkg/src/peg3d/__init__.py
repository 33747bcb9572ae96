"""3D pursuit-evasion game simulator with a fuzzy actor-critic learning toolkit."""

from ._version import __version__
from .env import (
    AgentState,
    Arena,
    Obstacle,
    StepCommand,
    check_termination,
    collision_check,
    heading_vector,
    nearest_obstacle,
    step_agent,
)
from .fuzzy import (
    InputPartition,
    RuleBase,
    TriangularMF,
    build_default_partitions,
    firing_entropy,
    infer,
    uniform_partition,
)
from .geometry import (
    ApolloniusSphere,
    DegenerateInputError,
    angle_between,
    apollonius_sphere,
    dominance,
    in_evasion_halfspace,
    in_pursuit_cone,
    pursuit_cone_halfangle,
    pursuit_offset_angle,
)
from .learner import FuzzyActorCritic, extract_inputs
from .logs import EpisodeLog, StepRecord, export_csv, export_episode, export_json, load_episode
from .reward import (
    RewardConfig,
    attraction_reward,
    repulsion_reward,
    success_reward,
    total_reward,
)
from .scenarios import (
    LearnerConfig,
    Scenario,
    TrainConfig,
    builtin_scenarios,
    initial_states,
    load_config,
    place_obstacles,
)
from .training import (
    CheckpointLayoutError,
    TrainResult,
    evaluate,
    load_checkpoint,
    make_checkpoint,
    run_episode,
    save_checkpoint,
    train,
)
