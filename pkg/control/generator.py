"""Random substitutable models for tests and the ``generate`` command.

Every controller gets the same block width w. A base pair (B^1, N^1) with
[B^1; N^1] of full column rank is drawn, then each controller's blocks are
B^i = B^1 R^i and N^i = N^1 R^i for an invertible w x w mixer R^i (R^1 = I).
All blocks then share one column space, which is exactly open-loop
substitutability.
"""
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from config.settings import settings
from model.errors import RankFailureError
from model.system import Partition, SystemModel, validate_model

# draws outside these bounds are redrawn
_COND_LIMIT = 1e3
_MIXER_MIN_SINGULAR = 0.1


def _spd(rng: np.random.Generator, dim: int) -> np.ndarray:
    G = rng.standard_normal((dim, dim))
    return G @ G.T / dim + 0.1 * np.eye(dim)


def _even_split(total: int, parts: int) -> Tuple[int, ...]:
    base, extra = divmod(total, parts)
    return tuple(base + (1 if i < extra else 0) for i in range(parts))


def _draw_inputs(
    rng: np.random.Generator, d_x: int, d_c: int, width: int, n: int
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    B1 = rng.standard_normal((d_x, width))
    N1 = rng.standard_normal((d_c, width))
    base = np.vstack([B1, N1])
    if np.linalg.matrix_rank(base) < width or np.linalg.cond(base) > _COND_LIMIT:
        return None
    mixers: List[np.ndarray] = [np.eye(width)]
    for _ in range(n - 1):
        R = rng.standard_normal((width, width))
        singular = np.linalg.svd(R, compute_uv=False)
        if singular[-1] < _MIXER_MIN_SINGULAR or singular[0] > _COND_LIMIT * singular[-1]:
            return None
        mixers.append(R)
    B = np.hstack([B1 @ R for R in mixers])
    N = np.hstack([N1 @ R for R in mixers])
    return B, N


def generate_substitutable(
    d_x: int,
    d_c: int,
    width: int,
    n: int,
    seed: int,
    horizon: int = settings.default_horizon,
    obs_width: Optional[int] = None,
) -> SystemModel:
    """Draw a random model that passes ``check_substitutable``.

    Args:
        d_x: State dimension.
        d_c: Cost output dimension.
        width: Control width w of every controller.
        n: Number of controllers.
        seed: Generator seed; the same arguments always give the same model.
        horizon: Decision steps T.
        obs_width: Observation rows per controller. ``None`` gives a
            state-feedback model.

    Returns:
        Validated ``SystemModel``. The state is split evenly into n blocks
        when d_x >= n, otherwise no state partition is declared.

    Raises:
        ValueError: Non-positive dimensions, or d_x + d_c < w (full column
            rank impossible).
        RankFailureError: Rank conditions not met within the retry budget.
    """
    if min(d_x, d_c, width, n, horizon) < 1:
        raise ValueError("dimensions, n and horizon must all be >= 1")
    if d_x + d_c < width:
        raise ValueError(f"[B; N] has {d_x + d_c} rows, cannot have column rank {width}")

    rng = np.random.default_rng(seed)
    inputs = None
    for attempt in range(1, settings.generator_max_retries + 1):
        inputs = _draw_inputs(rng, d_x, d_c, width, n)
        if inputs is not None:
            break
        logger.debug(f"Generator draw {attempt} failed rank/conditioning checks; retrying")
    if inputs is None:
        raise RankFailureError(settings.generator_max_retries)
    B, N = inputs

    A = rng.standard_normal((d_x, d_x)) / np.sqrt(d_x)
    M = rng.standard_normal((d_c, d_x))
    Sigma_x = _spd(rng, d_x)
    Sigma_w = _spd(rng, d_x)

    C = Sigma_v = obs_part = None
    if obs_width is not None:
        d_y = obs_width * n
        C = rng.standard_normal((d_y, d_x))
        Sigma_v = _spd(rng, d_y)
        obs_part = Partition((obs_width,) * n)

    model = SystemModel(
        A=A, B=B, M=M, N=N,
        controller_partition=Partition((width,) * n),
        horizon=horizon, n=n,
        Sigma_x=Sigma_x, Sigma_w=Sigma_w,
        state_partition=Partition(_even_split(d_x, n)) if d_x >= n else None,
        C=C, observation_partition=obs_part, Sigma_v=Sigma_v,
    )
    logger.debug(f"Generated model seed={seed}: d_x={d_x}, d_c={d_c}, w={width}, n={n}")
    return validate_model(model)


def break_substitutability(model: SystemModel, controller: int, seed: int) -> SystemModel:
    """Copy of ``model`` where one column of controller ``controller`` leaves range([B; N]).

    The replaced column of [B^i; N^i] is a random unit vector from the
    orthogonal complement of the other controllers' stacked columns, so that
    controller's extra direction cannot be replicated by anyone else.

    Raises:
        ValueError: The stacked input matrix has no orthogonal complement.
    """
    others = [j for j in range(model.n) if j != controller]
    basis = np.hstack([model.stacked_block(j) for j in others]) if others else model.stacked
    complement = linalg.null_space(basis.T)
    if complement.shape[1] == 0:
        raise ValueError("stacked input matrix spans the whole output space")

    rng = np.random.default_rng(seed)
    direction = complement @ rng.standard_normal(complement.shape[1])
    direction /= np.linalg.norm(direction)

    stacked = np.array(model.stacked)
    column = model.controller_partition.slice(controller).start
    stacked[:, column] = direction
    return validate_model(SystemModel(
        A=model.A, B=stacked[:model.dx], M=model.M, N=stacked[model.dx:],
        controller_partition=model.controller_partition,
        horizon=model.horizon, n=model.n,
        Sigma_x=model.Sigma_x, Sigma_w=model.Sigma_w,
        state_partition=model.state_partition,
        C=model.C, observation_partition=model.observation_partition,
        Sigma_v=model.Sigma_v,
    ))
