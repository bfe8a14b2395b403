"""Reference profiles: the zero strategy and the single-leader strategy.

The zero profile never acts; its cost shows what is lost when substitution
is not exploited at all. In the leader profile one controller with full
information replays the whole centralized action on its own,
u^l = Lambda^l K_k x_k (or K_k z_k), while everybody else stays at zero.
"""
from typing import Tuple

import numpy as np

from model.errors import NotSubstitutableError
from model.scenario import StrategyKind
from model.system import FeedbackMode
from strategies.base import (
    ControllerPolicy,
    InformationStructure,
    LinearForm,
    StepView,
    StrategyProfile,
    Synthesis,
    control_rows,
    observed_dim,
)
from strategies.centralized import FilterPolicy, StateFeedbackPolicy, filter_memory_form


class ZeroPolicy(ControllerPolicy):

    def __init__(self, index: int, width: int):
        super().__init__(index)
        self.width = width

    def act(self, state: None, view: StepView) -> Tuple[np.ndarray, None]:
        return np.zeros(self.width), None


class ZeroProfile(StrategyProfile):
    kind = StrategyKind.ZERO

    def __init__(self, synthesis: Synthesis):
        model = synthesis.model
        policies = tuple(
            ZeroPolicy(i, model.controller_partition.sizes[i]) for i in range(model.n)
        )
        information = tuple(InformationStructure.empty(i) for i in range(model.n))
        super().__init__(synthesis, policies, information)

    @property
    def is_linear(self) -> bool:
        return True

    @property
    def memory_dim(self) -> int:
        return observed_dim(self.model)

    def linear_form(self, k: int) -> LinearForm:
        dim = self.memory_dim
        return LinearForm(
            Phi=np.zeros((dim, dim)), J=np.eye(dim), D=np.zeros((self.model.du, dim))
        )


class LeaderProfile(StrategyProfile):
    """Controller ``leader`` plays the centralized law for everyone.

    Args:
        synthesis: Solved schedules.
        leader: Index of the acting controller.

    Raises:
        NotSubstitutableError: The leader cannot substitute for the others.
    """

    kind = StrategyKind.LEADER

    def __init__(self, synthesis: Synthesis, leader: int = 0):
        model = synthesis.model
        if not 0 <= leader < model.n:
            raise IndexError(f"leader {leader} out of range for n = {model.n}")
        if not synthesis.subs.is_substitutable(leader):
            raise NotSubstitutableError([leader])
        self.leader = leader
        lam = synthesis.subs.lambdas[leader]
        self._leader_gains = tuple(lam @ K_k for K_k in synthesis.gains.K)

        policies = []
        information = []
        for i in range(model.n):
            if i == leader:
                if model.mode is FeedbackMode.STATE:
                    policies.append(StateFeedbackPolicy(i, self._leader_gains))
                else:
                    policies.append(FilterPolicy(i, synthesis, self._leader_gains))
                information.append(InformationStructure.centralized(i, model.mode))
            else:
                policies.append(ZeroPolicy(i, model.controller_partition.sizes[i]))
                information.append(InformationStructure.empty(i))
        super().__init__(synthesis, tuple(policies), tuple(information))

    @property
    def reproduces_centralized(self) -> bool:
        return True

    @property
    def is_linear(self) -> bool:
        return True

    @property
    def memory_dim(self) -> int:
        return self.model.dx

    def _control_gain(self, k: int) -> np.ndarray:
        return control_rows(self.model, self.leader, self._leader_gains[k])

    def linear_form(self, k: int) -> LinearForm:
        if self.mode is FeedbackMode.STATE:
            dx = self.model.dx
            return LinearForm(Phi=np.zeros((dx, dx)), J=np.eye(dx), D=self._control_gain(k))
        D_prev = self._control_gain(k - 1) if k > 0 else None
        return filter_memory_form(self.synthesis, k, D_prev, self._control_gain(k))
