import time

import pytest

from peg3d.scenarios import TrainConfig, builtin_scenarios
from peg3d.training import evaluate, train

ACCEPTANCE_SEEDS = (1, 2, 3, 4, 5)
EVAL_RUNS = 20


@pytest.fixture(scope="session")
def trained_protocol():
    """Full experimental protocol, computed once per test session.

    Trains both agents on each of the four built-in scenarios for five master
    seeds (200 episodes each, default hyperparameters), then evaluates every
    trained pair over 20 noise-free runs.  The end-to-end acceptance tests and
    the training-invariant tests all consume this cache.
    """
    results = {}
    t_start = time.time()
    for number, scenario in sorted(builtin_scenarios().items()):
        for seed in ACCEPTANCE_SEEDS:
            config = TrainConfig(seed=seed, log_steps="none")
            t0 = time.time()
            res = train(scenario, config)
            train_seconds = time.time() - t0
            metrics, rows = evaluate(
                res.learners, res.rulebase, scenario, config, runs=EVAL_RUNS
            )
            results[(number, seed)] = {
                "scenario": scenario,
                "config": config,
                "summaries": res.summaries,
                "metrics": metrics,
                "rows": rows,
                "learners": res.learners,
                "rulebase": res.rulebase,
                "train_seconds": train_seconds,
            }
    return {
        "results": results,
        "seeds": ACCEPTANCE_SEEDS,
        "eval_runs": EVAL_RUNS,
        "wall_seconds": time.time() - t_start,
    }
