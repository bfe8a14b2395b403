"""Centralized optimal profiles.

Every controller sees everything and applies its rows of the centralized
law: u_k = K_k x_k in state feedback and u_k = K_k z_k in output feedback
(certainty equivalence, the same K_k in both modes).
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from control.kalman import centralized_estimate_update, initial_estimate
from model.errors import ModelValidationError, Violation, ViolationKind
from model.scenario import StrategyKind
from model.system import FeedbackMode, SystemModel
from strategies.base import (
    ControllerPolicy,
    InformationStructure,
    LinearForm,
    StepView,
    StrategyProfile,
    Synthesis,
)


def require_mode(model: SystemModel, kind: StrategyKind, mode: FeedbackMode) -> None:
    """Raise a mode-mismatch validation error when ``kind`` does not fit the model."""
    if model.mode is not mode:
        raise ModelValidationError([Violation(
            ViolationKind.MODE_MISMATCH, "profile",
            f"profile '{kind.value}' needs a {mode.value} model, got {model.mode.value}",
        )])


class StateFeedbackPolicy(ControllerPolicy):
    """u_k^i = G_k x_k for a fixed per-step gain G_k (d_u^i x d_x)."""

    def __init__(self, index: int, gains: Sequence[np.ndarray]):
        super().__init__(index)
        self.gains = tuple(gains)

    def act(self, state: None, view: StepView) -> Tuple[np.ndarray, None]:
        return self.gains[view.k] @ view.x, None


class FilterPolicy(ControllerPolicy):
    """Runs the full Kalman filter on all observations and actions; u_k^i = G_k z_k."""

    def __init__(self, index: int, synthesis: Synthesis, gains: Sequence[np.ndarray]):
        super().__init__(index)
        self.synthesis = synthesis
        self.gains = tuple(gains)

    def act(self, state: Optional[np.ndarray], view: StepView) -> Tuple[np.ndarray, np.ndarray]:
        filt = self.synthesis.filter
        if view.k == 0:
            z = initial_estimate(filt, view.y)
        else:
            z = centralized_estimate_update(
                self.synthesis.model, filt, view.k - 1, state, view.u_prev, view.y
            )
        return self.gains[view.k] @ z, z


def filter_memory_form(
    synthesis: Synthesis, k: int, D_prev: Optional[np.ndarray], D: np.ndarray
) -> LinearForm:
    """Linear form of a profile whose memory is the centralized estimate z.

    z_k = (I - L_k C)(A + B D_{k-1}) z_{k-1} + L_k y_k, u_k = D_k z_k.
    """
    model, filt = synthesis.model, synthesis.filter
    if k == 0:
        Phi = np.zeros((model.dx, model.dx))
    else:
        Phi = filt.complements[k] @ (model.A + model.B @ D_prev)
    return LinearForm(Phi=Phi, J=filt.L[k], D=D)


class CentralizedSFProfile(StrategyProfile):
    kind = StrategyKind.CENTRALIZED_SF

    def __init__(self, synthesis: Synthesis):
        model = synthesis.model
        require_mode(model, self.kind, FeedbackMode.STATE)
        K = synthesis.gains.K
        policies = tuple(
            StateFeedbackPolicy(i, [K_k[model.controller_partition.slice(i)] for K_k in K])
            for i in range(model.n)
        )
        information = tuple(InformationStructure.centralized(i, model.mode) for i in range(model.n))
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
        dx = self.model.dx
        return LinearForm(Phi=np.zeros((dx, dx)), J=np.eye(dx), D=self.gains.K[k])


class CentralizedOFProfile(StrategyProfile):
    kind = StrategyKind.CENTRALIZED_OF

    def __init__(self, synthesis: Synthesis):
        model = synthesis.model
        require_mode(model, self.kind, FeedbackMode.OUTPUT)
        K = synthesis.gains.K
        policies = tuple(
            FilterPolicy(i, synthesis, [K_k[model.controller_partition.slice(i)] for K_k in K])
            for i in range(model.n)
        )
        information = tuple(InformationStructure.centralized(i, model.mode) for i in range(model.n))
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
        K = self.gains.K
        return filter_memory_form(self.synthesis, k, K[k - 1] if k > 0 else None, K[k])
