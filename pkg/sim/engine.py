"""Closed-loop simulation.

One run draws its noise bundle, starts every controller from its initial
memory, and loops k = 0..T-1:

    y_k  = C x_k + v_k                     (output feedback)
    u_k  = concat_i policy_i(view_k)
    c_k  = |M x_k + N u_k|^2
    x_{k+1} = A x_k + B u_k + w_k          (k < T-1)

Alongside, the centralized filter z_k is run on the same data, and two
residuals are tracked:

- estimate split: |z_k - sum_i s_k^i| / (1 + |z_k|) for profiles whose
  controllers keep local estimates (z_k is x_k in state feedback);
- superposition: |B(u_k - u*_k)|, |N(u_k - u*_k)| against the centralized
  action u*_k = K_k x_k or K_k z_k, for profiles meant to reproduce it.

Runs are independent; ``jobs > 1`` maps them over a thread pool, which
preserves run order.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger

from control.kalman import centralized_estimate_update, initial_estimate
from control.linalg import max_abs
from model.system import FeedbackMode, SystemModel
from sim.noise import draw_noise, step_dynamics
from strategies.base import StepView, StrategyProfile


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """Signals of one run, indexed by 0-based step.

    Attributes:
        run: Run index.
        x: States x_0..x_{T-1}, T x d_x.
        u: Joint actions, T x d_u.
        costs: Stage costs c_k, length T.
        y: Observations, T x d_y (output feedback).
        z: Centralized estimates, T x d_x (output feedback).
        s: Local estimates, T x n x d_x (profiles that keep them).
        estimate_residual: Max normalized |z_k - sum_i s_k^i|, if tracked.
        superposition_residual: Max normalized superposition gap, if tracked.
    """
    run: int
    x: np.ndarray
    u: np.ndarray
    costs: np.ndarray
    y: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    estimate_residual: Optional[float] = None
    superposition_residual: Optional[float] = None

    @property
    def total_cost(self) -> float:
        return float(np.sum(self.costs))

    @property
    def horizon(self) -> int:
        return self.x.shape[0]


def stage_cost(model: SystemModel, x: np.ndarray, u: np.ndarray) -> float:
    """|M x + N u|_2^2."""
    r = model.M @ x + model.N @ u
    return float(r @ r)


def simulate_run(model: SystemModel, profile: StrategyProfile, seed: int, run: int) -> SimulationTrace:
    """Simulate one run; see the module docstring for the loop."""
    noise = draw_noise(model, seed, run)
    output = model.mode is FeedbackMode.OUTPUT
    T = model.horizon
    gains, filt = profile.gains, profile.filter

    states = [policy.initial_state() for policy in profile.policies]
    xs, us, ys, zs, ss, costs = [], [], [], [], [], []
    split_res: List[float] = []
    super_res: List[float] = []

    x = noise.x0
    z = None
    u_prev = None
    for k in range(T):
        y = model.C @ x + noise.v[k] if output else None
        view = StepView(k=k, x=x, y=y, u_prev=u_prev)

        actions = []
        shares = []
        for i, policy in enumerate(profile.policies):
            action, states[i] = policy.act(states[i], view)
            actions.append(np.atleast_1d(action))
            shares.append(policy.local_estimate(states[i], view))
        u = np.concatenate(actions)

        if output:
            z = initial_estimate(filt, y) if k == 0 else centralized_estimate_update(
                model, filt, k - 1, z, u_prev, y
            )
        reference = z if output else x

        if all(share is not None for share in shares):
            stacked = np.stack(shares)
            ss.append(stacked)
            split_res.append(max_abs(reference - stacked.sum(axis=0)) / (1.0 + max_abs(reference)))

        if profile.reproduces_centralized:
            u_ref = gains.K[k] @ reference
            gap = max(max_abs(model.B @ (u - u_ref)), max_abs(model.N @ (u - u_ref)))
            super_res.append(gap / (1.0 + max_abs(u_ref)))

        xs.append(x)
        us.append(u)
        costs.append(stage_cost(model, x, u))
        if output:
            ys.append(y)
            zs.append(z)

        if k < T - 1:
            x = step_dynamics(model, x, u, noise.w[k])
        u_prev = u

    return SimulationTrace(
        run=run,
        x=np.array(xs),
        u=np.array(us),
        costs=np.array(costs),
        y=np.array(ys) if output else None,
        z=np.array(zs) if output else None,
        s=np.array(ss) if len(ss) == T else None,
        estimate_residual=max(split_res) if len(split_res) == T else None,
        superposition_residual=max(super_res) if super_res else None,
    )


def simulate(
    model: SystemModel,
    profile: StrategyProfile,
    seed: int,
    runs: int,
    jobs: int = 1,
) -> List[SimulationTrace]:
    """Simulate ``runs`` independent runs under common random numbers.

    Args:
        model: Model the profile was built for.
        profile: Strategy profile.
        seed: Base seed; run r uses the streams of (seed, r).
        runs: Number of runs (>= 1).
        jobs: Worker threads; results are identical for any value.

    Returns:
        Traces in run order.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if model != profile.model:
        raise ValueError("profile was built for a different model")

    def one(run: int) -> SimulationTrace:
        return simulate_run(model, profile, seed, run)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(one, range(runs)))
    else:
        traces = [one(run) for run in range(runs)]

    logger.info(f"Simulated {runs} run(s) of {profile.kind.value} (seed={seed}, jobs={jobs})")
    return traces
