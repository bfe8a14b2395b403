"""Shared fixtures and model builders for every test package.

- Built-in reference models (sum of actions, scalar LQR, scalar filter)
- The generated corpus: seeds 1..20, in both feedback modes
- A writer that turns a model into a scenario file
"""
import dataclasses
from pathlib import Path
from typing import Optional

import numpy as np
import pytest
from loguru import logger

from config.examples import ScalarLQR, SumOfActions
from control.generator import generate_substitutable
from model.scenario import ScenarioConfig, save_scenario
from model.system import Partition, SystemModel, validate_model

CORPUS_SEEDS = tuple(range(1, 21))


# ================================================================
# Builders
# ================================================================

def corpus_model(seed: int, output_feedback: bool = False, horizon: int = 4) -> SystemModel:
    """Generated substitutable model whose shape varies with the seed.

    d_x in {3, 4}, n in {2, 3}, w in {1, 2}, d_c = 3; d_x >= n so the state
    partition is always present.
    """
    return generate_substitutable(
        d_x=3 + seed % 2,
        d_c=3,
        width=1 + (seed // 3) % 2,
        n=2 + (seed // 2) % 2,
        seed=seed,
        horizon=horizon,
        obs_width=1 if output_feedback else None,
    )


def scalar_filter_model(
    Sigma_v: float = 1.0, Sigma_w: float = 1.0, horizon: int = 2
) -> SystemModel:
    """A = C = Sigma_x = 1, scalar controller."""
    return validate_model(SystemModel(
        A=[[1.0]], B=[[1.0]], M=[[1.0], [0.0]], N=[[0.0], [1.0]],
        controller_partition=Partition((1,)), horizon=horizon, n=1,
        Sigma_x=[[1.0]], Sigma_w=[[Sigma_w]],
        state_partition=Partition((1,)),
        C=[[1.0]], observation_partition=Partition((1,)), Sigma_v=[[Sigma_v]],
    ))


def orthogonal_inputs_model(horizon: int = 3) -> SystemModel:
    """B = I_2, N = 0: neither controller can stand in for the other."""
    return validate_model(SystemModel(
        A=[[1.0, 0.2], [0.0, 1.0]], B=np.eye(2),
        M=[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], N=np.zeros((3, 2)),
        controller_partition=Partition((1, 1)), horizon=horizon, n=2,
        Sigma_x=np.eye(2), Sigma_w=0.1 * np.eye(2),
        state_partition=Partition((1, 1)),
    ))


def with_changes(model: SystemModel, **changes) -> SystemModel:
    return validate_model(dataclasses.replace(model, **changes))


def write_scenario(directory: Path, model: SystemModel, name: str = "scenario.json",
                   seed: int = 0, runs: int = 20, profiles=(), trace: Optional[str] = None) -> Path:
    config = ScenarioConfig(model=model, seed=seed, num_runs=runs, profiles=tuple(profiles),
                            trace_path=trace)
    return save_scenario(config, directory / name)


# ================================================================
# Fixtures
# ================================================================

@pytest.fixture(autouse=True)
def quiet_logs():
    """Keep loguru output away from captured stderr unless a test adds a sink."""
    logger.remove()
    yield
    logger.remove()


@pytest.fixture
def sum_sf_model():
    return SumOfActions().build()


@pytest.fixture
def sum_of_model():
    return SumOfActions(output_feedback=True).build()


@pytest.fixture
def scalar_model():
    return ScalarLQR().build()


@pytest.fixture
def scalar_filter():
    return scalar_filter_model()


@pytest.fixture
def non_substitutable_model():
    return orthogonal_inputs_model()


@pytest.fixture(params=CORPUS_SEEDS[:5])
def sf_model(request):
    return corpus_model(request.param)


@pytest.fixture(params=CORPUS_SEEDS[:5])
def of_model(request):
    return corpus_model(request.param, output_feedback=True)
