"""Common-random-number noise streams.

Each (seed, run, signal) triple owns an independent generator seeded by
``SeedSequence(seed, spawn_key=(run, signal))``. Draws are taken row by row
with a fixed width, so the value at step t depends only on
(seed, run, signal, t), never on the profile being simulated or on which
worker runs it.
"""
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from control.linalg import covariance_factor
from model.system import SystemModel


class Stream(IntEnum):
    INITIAL_STATE = 0
    PROCESS = 1
    OBSERVATION = 2


@dataclass(frozen=True, eq=False)
class NoiseBundle:
    """All noise of one run.

    Attributes:
        seed: Base seed.
        run: Run index.
        x0: Initial state draw, length d_x.
        w: Process noise, (T - 1) x d_x; row k drives x_{k+1}.
        v: Observation noise, T x d_y (``None`` in state feedback).
    """
    seed: int
    run: int
    x0: np.ndarray
    w: np.ndarray
    v: Optional[np.ndarray] = None


def stream(seed: int, run: int, signal: Stream) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run, int(signal))))


def _gaussian_rows(gen: np.random.Generator, rows: int, cov: np.ndarray) -> np.ndarray:
    factor = covariance_factor(cov)
    return gen.standard_normal((rows, cov.shape[0])) @ factor.T


def draw_noise(model: SystemModel, seed: int, run: int) -> NoiseBundle:
    """Draw x_0, w_0..w_{T-2} and (output feedback) v_0..v_{T-1} for one run."""
    T = model.horizon
    x0 = _gaussian_rows(stream(seed, run, Stream.INITIAL_STATE), 1, model.Sigma_x)[0]
    w = _gaussian_rows(stream(seed, run, Stream.PROCESS), T - 1, model.Sigma_w)
    v = None
    if model.Sigma_v is not None:
        v = _gaussian_rows(stream(seed, run, Stream.OBSERVATION), T, model.Sigma_v)
    for array in (x0, w) + (() if v is None else (v,)):
        array.setflags(write=False)
    return NoiseBundle(seed=seed, run=run, x0=x0, w=w, v=v)


def step_dynamics(model: SystemModel, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """x_{k+1} = A x_k + B u_k + w_k."""
    return model.A @ x + model.B @ u + w
