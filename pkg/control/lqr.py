"""Centralized finite-horizon LQR with the cross-weighted stage cost.

The stage cost |M x + N u|^2 expands to x'M'Mx + 2u'N'Mx + u'N'Nu, so the
backward recursion (P after the last step is zero) reads

    G_k = N'N + B'P_{k+1}B
    H_k = N'M + B'P_{k+1}A
    K_k = -pinv(G_k) H_k
    P_k = M'M + A'P_{k+1}A - H_k' pinv(G_k) H_k

Steps are 0-based (k = t - 1). When G_k is ill-conditioned the minimum-norm
stationary gain is used and the step is recorded in ``singular_steps``.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy import linalg

from control.linalg import is_well_conditioned, pinv, symmetrize
from model.errors import MissingPartitionError
from model.system import Partition, SystemModel


@dataclass(frozen=True, eq=False)
class GainSchedule:
    """Time-indexed centralized gains.

    Attributes:
        K: ``K[k]`` is the d_u x d_x gain of step k (T entries).
        P: ``P[k]`` is the value matrix before step k; ``P[T]`` is zero (T + 1 entries).
        singular_steps: Steps where G_k needed the pseudo-inverse fallback.
        state_partition: Column split of each K[k] into K_k^i.
    """
    K: Tuple[np.ndarray, ...]
    P: Tuple[np.ndarray, ...]
    singular_steps: Tuple[int, ...]
    state_partition: Optional[Partition] = None

    @property
    def horizon(self) -> int:
        return len(self.K)

    @property
    def singular(self) -> bool:
        return bool(self.singular_steps)

    def gain_block(self, k: int, i: int) -> np.ndarray:
        return gain_block(self, k, i)

    def substituted_gain(self, k: int, i: int, lam: np.ndarray, local: bool = True) -> np.ndarray:
        """Lambda^i K_k^i (``local=True``) or Lambda^i K_k (``local=False``)."""
        gain = self.gain_block(k, i) if local else self.K[k]
        return lam @ gain


def solve_centralized_lqr(model: SystemModel) -> GainSchedule:
    """Run the backward Riccati recursion over the model horizon.

    Args:
        model: Validated model.

    Returns:
        ``GainSchedule`` with T gains and T + 1 value matrices.
    """
    A, B, M, N = model.A, model.B, model.M, model.N
    T = model.horizon
    MtM = M.T @ M
    NtM = N.T @ M
    NtN = N.T @ N

    P_next = np.zeros((model.dx, model.dx))
    gains = [None] * T
    values = [None] * (T + 1)
    P_next.setflags(write=False)
    values[T] = P_next
    singular = []

    for k in range(T - 1, -1, -1):
        G = NtN + B.T @ P_next @ B
        H = NtM + B.T @ P_next @ A
        ok, cond = is_well_conditioned(G)
        if ok:
            G_inv_H = linalg.solve(G, H, assume_a="sym")
        else:
            G_inv_H = pinv(G) @ H
            singular.append(k)
            logger.debug(f"G at step {k} has condition {cond:.3e}; using pseudo-inverse")
        K = -G_inv_H
        P = symmetrize(MtM + A.T @ P_next @ A - H.T @ G_inv_H)
        K.setflags(write=False)
        P.setflags(write=False)
        gains[k] = K
        values[k] = P
        P_next = P

    if singular:
        logger.info(f"Riccati recursion used the pseudo-inverse at {len(singular)} of {T} steps")
    logger.info(f"Solved centralized LQR: T={T}, d_x={model.dx}, d_u={model.du}")
    return GainSchedule(
        K=tuple(gains),
        P=tuple(values),
        singular_steps=tuple(sorted(singular)),
        state_partition=model.state_partition,
    )


def gain_block(schedule: GainSchedule, k: int, i: int) -> np.ndarray:
    """Column block K_k^i acting on subsystem state X^i.

    Raises:
        MissingPartitionError: The model declares no state partition.
    """
    if schedule.state_partition is None:
        raise MissingPartitionError("state_partition")
    return schedule.K[k][:, schedule.state_partition.slice(i)]
