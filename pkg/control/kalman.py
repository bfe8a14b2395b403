"""Centralized time-varying Kalman filter.

Forward recursion (0-based steps, prior of step 0 is Sigma_x):

    prior_0     = Sigma_x
    prior_{k+1} = A Sigma_k A' + Sigma_w
    L_k         = prior_k C' (C prior_k C' + Sigma_v)^-1
    Sigma_k     = (I - L_k C) prior_k

and the estimate z_k = E[x_k | y_0..y_k, u_0..u_{k-1}] follows

    z_0     = L_0 y_0
    z_{k+1} = (I - L_{k+1} C)(A z_k + B u_k) + L_{k+1} y_{k+1}.

The first gain uses the prior Sigma_x, i.e. the standard first measurement
update, so that z_0 is the conditional mean given y_0.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from control.linalg import is_well_conditioned, psd_floor
from model.errors import MissingPartitionError, SingularInnovationError
from model.system import Partition, SystemModel


@dataclass(frozen=True, eq=False)
class FilterSchedule:
    """Filter gains and covariances over the horizon.

    Attributes:
        L: ``L[k]`` is the d_x x d_y gain of step k.
        Sigma: ``Sigma[k]`` is the posterior error covariance after y_k.
        priors: ``priors[k]`` is the covariance before y_k is used.
        complements: ``complements[k] = I - L[k] C``.
        observation_partition: Column split of each L[k] into L_k^i.
    """
    L: Tuple[np.ndarray, ...]
    Sigma: Tuple[np.ndarray, ...]
    priors: Tuple[np.ndarray, ...]
    complements: Tuple[np.ndarray, ...]
    observation_partition: Optional[Partition] = None

    @property
    def horizon(self) -> int:
        return len(self.L)

    def gain_block(self, k: int, i: int) -> np.ndarray:
        """L_k^i, the columns of L_k acting on Y^i.

        Raises:
            MissingPartitionError: The schedule carries no observation partition.
        """
        if self.observation_partition is None:
            raise MissingPartitionError("observation_partition")
        return self.L[k][:, self.observation_partition.slice(i)]


def _gain(prior: np.ndarray, C: np.ndarray, Sigma_v: np.ndarray, step: int) -> np.ndarray:
    innovation = C @ prior @ C.T + Sigma_v
    ok, cond = is_well_conditioned(innovation)
    if not ok:
        raise SingularInnovationError(step, cond)
    factor = linalg.cho_factor(innovation)
    # L = prior C' S^-1  <=>  S L' = C prior
    return linalg.cho_solve(factor, C @ prior).T


def solve_kalman(model: SystemModel) -> FilterSchedule:
    """Compute L_k and Sigma_k for k = 0..T-1.

    Raises:
        ValueError: The model is state feedback (no C).
        SingularInnovationError: C prior C' + Sigma_v is singular at some step.
    """
    if model.C is None:
        raise ValueError("solve_kalman needs an output-feedback model")

    A, C = model.A, model.C
    eye = np.eye(model.dx)
    gains, posts, priors, comps = [], [], [], []

    prior = psd_floor(model.Sigma_x)
    for k in range(model.horizon):
        if k > 0:
            prior = psd_floor(A @ posts[-1] @ A.T + model.Sigma_w)
        L = _gain(prior, C, model.Sigma_v, k)
        comp = eye - L @ C
        post = psd_floor(comp @ prior)
        for matrix in (L, comp, post, prior):
            matrix.setflags(write=False)
        gains.append(L)
        comps.append(comp)
        posts.append(post)
        priors.append(prior)

    logger.info(f"Solved Kalman filter: T={model.horizon}, d_x={model.dx}, d_y={model.dy}")
    return FilterSchedule(
        L=tuple(gains),
        Sigma=tuple(posts),
        priors=tuple(priors),
        complements=tuple(comps),
        observation_partition=model.observation_partition,
    )


def initial_estimate(schedule: FilterSchedule, y0: np.ndarray) -> np.ndarray:
    """z_0 = L_0 y_0."""
    return schedule.L[0] @ y0


def centralized_estimate_update(
    model: SystemModel,
    schedule: FilterSchedule,
    k: int,
    z: np.ndarray,
    u: np.ndarray,
    y_next: np.ndarray,
) -> np.ndarray:
    """One filter step: z_{k+1} from z_k, u_k and y_{k+1}."""
    return (
        schedule.complements[k + 1] @ (model.A @ z + model.B @ u)
        + schedule.L[k + 1] @ y_next
    )
