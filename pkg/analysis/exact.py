"""Exact expected cost of linear profiles by covariance propagation.

With the profile's linear form (m_k = Phi_k m_{k-1} + J_k y~_k, u_k = D_k m_k)
and y~_k = C~ x_k + v~_k, the pre-decision vector p_k = (x_k, m_{k-1}) and
the post-decision vector q_k = (x_k, m_k) evolve as

    q_k     = [[I, 0], [J_k C~, Phi_k]] p_k + [[0], [J_k]] v~_k
    p_{k+1} = [[A, B D_k], [0, I]] q_k + [[I], [0]] w_k

starting from p_0 = (x_0, 0). Everything is zero mean, so the stage cost is
E|M x_k + N u_k|^2 = trace(Q_k Cov(q_k) Q_k') with Q_k = [M, N D_k].
In state feedback C~ = I and v~ = 0.
"""
from typing import Tuple

import numpy as np
from scipy import linalg

from control.linalg import symmetrize
from control.lqr import GainSchedule
from model.errors import NonlinearProfileError
from model.system import FeedbackMode, SystemModel
from strategies.base import StrategyProfile


def _observation(model: SystemModel) -> Tuple[np.ndarray, np.ndarray]:
    if model.mode is FeedbackMode.STATE:
        return np.eye(model.dx), np.zeros((model.dx, model.dx))
    return model.C, model.Sigma_v


def cost_to_go_profile(model: SystemModel, profile: StrategyProfile) -> np.ndarray:
    """Expected stage costs E[c_0], ..., E[c_{T-1}] under ``profile``.

    Raises:
        NonlinearProfileError: The profile has no linear form.
    """
    if not profile.is_linear:
        raise NonlinearProfileError(profile.kind.value)

    dx, dm = model.dx, profile.memory_dim
    C_obs, Sigma_obs = _observation(model)
    eye_x, eye_m = np.eye(dx), np.eye(dm)
    process = linalg.block_diag(model.Sigma_w, np.zeros((dm, dm)))

    cov = linalg.block_diag(model.Sigma_x, np.zeros((dm, dm)))
    stages = np.zeros(model.horizon)
    for k in range(model.horizon):
        form = profile.linear_form(k)
        update = np.block([
            [eye_x, np.zeros((dx, dm))],
            [form.J @ C_obs, form.Phi],
        ])
        inject = np.vstack([np.zeros((dx, form.J.shape[1])), form.J])
        cov = symmetrize(update @ cov @ update.T + inject @ Sigma_obs @ inject.T)

        Q = np.hstack([model.M, model.N @ form.D])
        stages[k] = max(float(np.trace(Q @ cov @ Q.T)), 0.0)

        if k < model.horizon - 1:
            advance = np.block([
                [model.A, model.B @ form.D],
                [np.zeros((dm, dx)), eye_m],
            ])
            cov = symmetrize(advance @ cov @ advance.T + process)
    return stages


def exact_expected_cost(model: SystemModel, profile: StrategyProfile) -> float:
    """E[sum_k |M x_k + N u_k|^2] under ``profile``, in closed form."""
    return float(np.sum(cost_to_go_profile(model, profile)))


def value_function_cost(model: SystemModel, gains: GainSchedule) -> float:
    """Optimal state-feedback cost from the value matrices alone.

    trace(P_0 Sigma_x) + sum_{k=1}^{T-1} trace(P_k Sigma_w); an independent
    check of ``exact_expected_cost`` for the centralized state-feedback law.
    """
    cost = float(np.trace(gains.P[0] @ model.Sigma_x))
    for k in range(1, model.horizon):
        cost += float(np.trace(gains.P[k] @ model.Sigma_w))
    return cost
