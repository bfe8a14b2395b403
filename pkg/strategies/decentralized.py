"""Decentralized strategies that match the centralized cost.

When every controller can substitute for the others in open loop, each one
can replay its share of the centralized law by itself:

    state feedback   u_k^i = Lambda^i K_k^i x_k^i
    output feedback  u_k^i = Lambda^i K_k s_k^i

where s^i is a local estimator driven only by controller i's own
observations and actions:

    s_0^i     = L_0^i y_0^i
    s_{k+1}^i = (I - L_{k+1} C)(A s_k^i + B^i u_k^i) + L_{k+1}^i y_{k+1}^i

The shares add up to the centralized estimate, z_k = sum_i s_k^i, so the
superposed actions reproduce B K_k z_k and N K_k z_k exactly. In state
feedback the share is simply x_k^i embedded in the full state.
"""
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from model.errors import MissingPartitionError, NotSubstitutableError
from model.scenario import StrategyKind
from model.system import FeedbackMode
from strategies.base import (
    ControllerPolicy,
    InformationStructure,
    LinearForm,
    StepView,
    StrategyProfile,
    Synthesis,
)
from strategies.centralized import require_mode


def _require(synthesis: Synthesis, i: int) -> None:
    if not synthesis.subs.is_substitutable(i):
        raise NotSubstitutableError([i])


# ================================================================
# Per-controller laws
# ================================================================

def initial_local_estimate(synthesis: Synthesis, i: int, y0_i: np.ndarray) -> np.ndarray:
    """s_0^i = L_0^i y_0^i."""
    return synthesis.filter.gain_block(0, i) @ y0_i


def local_estimate_update(
    synthesis: Synthesis,
    i: int,
    k: int,
    s: np.ndarray,
    u_i: np.ndarray,
    y_next_i: np.ndarray,
) -> np.ndarray:
    """s_{k+1}^i from controller i's own s_k^i, u_k^i and y_{k+1}^i.

    Args:
        synthesis: Solved schedules (output feedback).
        i: Controller index.
        k: Current step; the result belongs to step k + 1.
        s: s_k^i, length d_x.
        u_i: Controller i's own action u_k^i.
        y_next_i: Controller i's own observation block y_{k+1}^i.
    """
    model, filt = synthesis.model, synthesis.filter
    return (
        filt.complements[k + 1] @ (model.A @ s + model.B_block(i) @ u_i)
        + filt.gain_block(k + 1, i) @ y_next_i
    )


def decentralized_sf_action(synthesis: Synthesis, i: int, k: int, x_i: np.ndarray) -> np.ndarray:
    """u_k^i = Lambda^i K_k^i x_k^i.

    Raises:
        NotSubstitutableError: Controller i cannot substitute for the others.
        MissingPartitionError: The model has no state partition.
    """
    _require(synthesis, i)
    return synthesis.gains.substituted_gain(k, i, synthesis.subs.lambdas[i]) @ x_i


def decentralized_of_action(synthesis: Synthesis, i: int, k: int, s_i: np.ndarray) -> np.ndarray:
    """u_k^i = Lambda^i K_k s_k^i.

    Raises:
        NotSubstitutableError: Controller i cannot substitute for the others.
    """
    _require(synthesis, i)
    return synthesis.gains.substituted_gain(k, i, synthesis.subs.lambdas[i], local=False) @ s_i


# ================================================================
# Policies
# ================================================================

class DecentralizedSFPolicy(ControllerPolicy):
    """Memoryless; reads only x_k^i."""

    def __init__(self, index: int, synthesis: Synthesis):
        super().__init__(index)
        self.synthesis = synthesis
        self._block = synthesis.model.state_partition.slice(index)

    def act(self, state: None, view: StepView) -> Tuple[np.ndarray, None]:
        return decentralized_sf_action(self.synthesis, self.index, view.k, view.x[self._block]), None

    def local_estimate(self, state: None, view: StepView) -> np.ndarray:
        return self.synthesis.model.state_partition.embed(self.index, view.x[self._block])


class DecentralizedOFPolicy(ControllerPolicy):
    """Runs its local estimator on y^i and u^i only."""

    def __init__(self, index: int, synthesis: Synthesis):
        super().__init__(index)
        self.synthesis = synthesis
        model = synthesis.model
        self._obs = model.observation_partition.slice(index)
        self._ctrl = model.controller_partition.slice(index)

    def act(self, state: Optional[np.ndarray], view: StepView) -> Tuple[np.ndarray, np.ndarray]:
        if view.k == 0:
            s = initial_local_estimate(self.synthesis, self.index, view.y[self._obs])
        else:
            s = local_estimate_update(
                self.synthesis, self.index, view.k - 1, state,
                view.u_prev[self._ctrl], view.y[self._obs],
            )
        return decentralized_of_action(self.synthesis, self.index, view.k, s), s

    def local_estimate(self, state: np.ndarray, view: StepView) -> np.ndarray:
        return state


# ================================================================
# Profiles
# ================================================================

class DecentralizedSFProfile(StrategyProfile):
    """Each controller sees only its own current subsystem state."""

    kind = StrategyKind.DECENTRALIZED_SF

    def __init__(self, synthesis: Synthesis):
        model = synthesis.model
        require_mode(model, self.kind, FeedbackMode.STATE)
        if model.state_partition is None:
            raise MissingPartitionError("state_partition")
        synthesis.subs.require()
        policies = tuple(DecentralizedSFPolicy(i, synthesis) for i in range(model.n))
        information = tuple(InformationStructure.local(i, model.mode) for i in range(model.n))
        super().__init__(synthesis, policies, information)

    @property
    def reproduces_centralized(self) -> bool:
        return True

    @property
    def is_linear(self) -> bool:
        return True

    @property
    def memory_dim(self) -> int:
        return self.model.dx

    def linear_form(self, k: int) -> LinearForm:
        model = self.model
        D = np.zeros((model.du, model.dx))
        for i in range(model.n):
            rows = model.controller_partition.slice(i)
            cols = model.state_partition.slice(i)
            D[rows, cols] = self.gains.substituted_gain(k, i, self.subs.lambdas[i])
        return LinearForm(Phi=np.zeros((model.dx, model.dx)), J=np.eye(model.dx), D=D)


class DecentralizedOFProfile(StrategyProfile):
    """Each controller sees only its own observations and its own past actions.

    The memory of the linear form stacks all local estimators (s^1; ...; s^n).
    """

    kind = StrategyKind.DECENTRALIZED_OF

    def __init__(self, synthesis: Synthesis):
        model = synthesis.model
        require_mode(model, self.kind, FeedbackMode.OUTPUT)
        synthesis.subs.require()
        policies = tuple(DecentralizedOFPolicy(i, synthesis) for i in range(model.n))
        information = tuple(InformationStructure.local(i, model.mode) for i in range(model.n))
        super().__init__(synthesis, policies, information)

    @property
    def reproduces_centralized(self) -> bool:
        return True

    @property
    def is_linear(self) -> bool:
        return True

    @property
    def memory_dim(self) -> int:
        return self.model.n * self.model.dx

    def _control_gain(self, k: int) -> np.ndarray:
        model = self.model
        D = np.zeros((model.du, self.memory_dim))
        for i in range(model.n):
            rows = model.controller_partition.slice(i)
            D[rows, i * model.dx:(i + 1) * model.dx] = self.gains.substituted_gain(
                k, i, self.subs.lambdas[i], local=False
            )
        return D

    def linear_form(self, k: int) -> LinearForm:
        model, filt = self.model, self.filter
        dx = model.dx
        if k == 0:
            Phi = np.zeros((self.memory_dim, self.memory_dim))
        else:
            Phi = linalg.block_diag(*[
                filt.complements[k] @ (
                    model.A
                    + model.B_block(i)
                    @ self.gains.substituted_gain(k - 1, i, self.subs.lambdas[i], local=False)
                )
                for i in range(model.n)
            ])
        J = np.zeros((self.memory_dim, model.dy))
        for i in range(model.n):
            J[i * dx:(i + 1) * dx, model.observation_partition.slice(i)] = filt.gain_block(k, i)
        return LinearForm(Phi=Phi, J=J, D=self._control_gain(k))
