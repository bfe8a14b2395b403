"""Batch reference computations for the recursive solvers.

Both oracles unroll the horizon into one big linear-Gaussian (or quadratic)
problem and solve it in a single shot, sharing no code path with the
recursions in ``lqr.py`` and ``kalman.py``. They exist to cross-check those
recursions; the unrolled problems grow with the horizon.
"""
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg

from config.settings import settings
from control.linalg import condition, pinv
from model.errors import SingularObservationCovarianceError
from model.system import SystemModel


def batch_conditioning_oracle(
    model: SystemModel,
    controls: Sequence[np.ndarray],
    observations: Sequence[np.ndarray],
) -> np.ndarray:
    """E[x_t | y_0..y_t] with the controls u_0..u_{t-1} treated as known.

    The base Gaussian is xi = (x_0, w_0..w_{t-1}, v_0..v_t). Every x_j and y_j
    is written as an affine map of xi, and the conditional mean follows from
    one linear solve against the joint observation covariance.

    Args:
        model: Output-feedback model.
        controls: t control vectors.
        observations: t + 1 observation vectors.

    Raises:
        SingularObservationCovarianceError: Cov(y_0..y_t) is singular.
    """
    t = len(observations) - 1
    if len(controls) != t:
        raise ValueError(f"expected {t} controls for {t + 1} observations, got {len(controls)}")
    if model.C is None:
        raise ValueError("batch conditioning needs an output-feedback model")

    dx, dy = model.dx, model.dy
    dim = dx + t * dx + (t + 1) * dy
    base_cov = linalg.block_diag(
        model.Sigma_x, *([model.Sigma_w] * t), *([model.Sigma_v] * (t + 1))
    )

    def w_select(j: int) -> np.ndarray:
        sel = np.zeros((dx, dim))
        sel[:, dx + j * dx: dx + (j + 1) * dx] = np.eye(dx)
        return sel

    def v_select(j: int) -> np.ndarray:
        sel = np.zeros((dy, dim))
        start = dx + t * dx + j * dy
        sel[:, start:start + dy] = np.eye(dy)
        return sel

    mean = np.zeros(dx)
    gain = np.zeros((dx, dim))
    gain[:, :dx] = np.eye(dx)
    obs_maps: List[np.ndarray] = []
    obs_means: List[np.ndarray] = []
    for j in range(t + 1):
        obs_maps.append(model.C @ gain + v_select(j))
        obs_means.append(model.C @ mean)
        if j < t:
            mean = model.A @ mean + model.B @ np.asarray(controls[j], dtype=float)
            gain = model.A @ gain + w_select(j)

    H = np.vstack(obs_maps)
    cov_y = H @ base_cov @ H.T
    cov_xy = gain @ base_cov @ H.T
    cond = condition(cov_y)
    if not np.isfinite(cond) or cond > settings.cond_limit:
        raise SingularObservationCovarianceError(cond)
    innovation = np.concatenate([np.asarray(y, dtype=float) for y in observations]) - np.concatenate(obs_means)
    return mean + cov_xy @ linalg.solve(cov_y, innovation, assume_a="pos")


def batch_lqr_oracle(model: SystemModel, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Optimal gain and value matrix at step k by one stacked least-squares solve.

    The remaining cost from step k is |F x + H U|^2 with U = (u_k..u_{T-1});
    minimizing over U gives U* = -pinv(H) F x, whose leading block is K_k x,
    and the minimum is x' F'(I - H pinv(H)) F x.

    Returns:
        ``(K_k, P_k)``.
    """
    A, B, M, N = model.A, model.B, model.M, model.N
    steps = model.horizon - k
    dc, dx, du = model.dc, model.dx, model.du

    powers = [np.eye(dx)]
    for _ in range(steps):
        powers.append(A @ powers[-1])

    F = np.zeros((steps * dc, dx))
    H = np.zeros((steps * dc, steps * du))
    for j in range(steps):
        rows = slice(j * dc, (j + 1) * dc)
        F[rows] = M @ powers[j]
        H[rows, j * du:(j + 1) * du] = N
        for l in range(j):
            H[rows, l * du:(l + 1) * du] = M @ powers[j - 1 - l] @ B

    H_pinv = pinv(H)
    solution = -H_pinv @ F
    value = F.T @ (F - H @ (H_pinv @ F))
    return solution[:du], 0.5 * (value + value.T)
