"""Strategy interfaces.

A strategy profile is one ``ControllerPolicy`` per controller plus the
information each one declares it uses. Policies are immutable; whatever a
controller remembers between steps lives in an explicit state value that the
caller threads through ``act``:

    state = policy.initial_state()
    for k in range(T):
        u_i, state = policy.act(state, StepView(k, x_k, y_k, u_{k-1}))

``StepView`` always carries the full joint signals. A policy may read
anything, and ``strategies.feasibility`` checks black-box that it only reads
what its ``InformationStructure`` declares.

Linear profiles also expose ``linear_form(k)``: with memory m_k,

    m_k = Phi_k m_{k-1} + J_k y~_k,      u_k = D_k m_k,

where y~_k is the observation (output feedback) or the state (state
feedback). ``analysis.exact`` propagates covariances through this form.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, FrozenSet, Optional, Tuple

import numpy as np

from control.kalman import FilterSchedule, solve_kalman
from control.lqr import GainSchedule, solve_centralized_lqr
from control.substitution import SubstitutionSet, check_substitutable
from model.errors import NonlinearProfileError
from model.scenario import StrategyKind
from model.system import FeedbackMode, SystemModel


# ================================================================
# Information structures
# ================================================================

class SignalKind(str, Enum):
    STATE = "x"
    OBSERVATION = "y"
    CONTROL = "u"


@dataclass(frozen=True)
class SignalAccess:
    """Read access to one signal family.

    Attributes:
        kind: Which signal.
        owners: Block indices that may be read; ``None`` means every block.
        history: ``True`` for all past and current values, ``False`` for the
            current value only. For controls "current" is the previous step,
            the latest action known when deciding.
    """
    kind: SignalKind
    owners: Optional[FrozenSet[int]] = None
    history: bool = False

    def allows(self, kind: SignalKind, owner: int, tau: int, k: int) -> bool:
        if kind is not self.kind:
            return False
        if self.owners is not None and owner not in self.owners:
            return False
        latest = k - 1 if kind is SignalKind.CONTROL else k
        return tau <= latest if self.history else tau == latest


@dataclass(frozen=True)
class InformationStructure:
    """Signals controller ``controller`` declares it may use at every step."""
    controller: int
    access: Tuple[SignalAccess, ...] = ()

    def allows(self, kind: SignalKind, owner: int, tau: int, k: int) -> bool:
        """Whether block ``owner`` of signal ``kind`` at time ``tau`` is readable at step ``k``."""
        return any(a.allows(kind, owner, tau, k) for a in self.access)

    def describe(self) -> str:
        if not self.access:
            return "{}"
        parts = []
        for a in self.access:
            who = "*" if a.owners is None else ",".join(str(o) for o in sorted(a.owners))
            when = "history" if a.history else "current"
            parts.append(f"{a.kind.value}[{who}]:{when}")
        return "{" + "; ".join(parts) + "}"

    @classmethod
    def empty(cls, controller: int) -> "InformationStructure":
        return cls(controller)

    @classmethod
    def centralized(cls, controller: int, mode: FeedbackMode) -> "InformationStructure":
        """Everything: the full current state, or all observations and actions so far."""
        if mode is FeedbackMode.STATE:
            return cls(controller, (SignalAccess(SignalKind.STATE),))
        return cls(controller, (
            SignalAccess(SignalKind.OBSERVATION, history=True),
            SignalAccess(SignalKind.CONTROL, history=True),
        ))

    @classmethod
    def local(cls, controller: int, mode: FeedbackMode) -> "InformationStructure":
        """Own current subsystem state, or own observations and own actions so far."""
        own = frozenset({controller})
        if mode is FeedbackMode.STATE:
            return cls(controller, (SignalAccess(SignalKind.STATE, own),))
        return cls(controller, (
            SignalAccess(SignalKind.OBSERVATION, own, history=True),
            SignalAccess(SignalKind.CONTROL, own, history=True),
        ))

    def enlarged(self, *extra: SignalAccess) -> "InformationStructure":
        return InformationStructure(self.controller, self.access + tuple(extra))


# ================================================================
# Policies
# ================================================================

@dataclass(frozen=True)
class StepView:
    """Joint signals available at step k (0-based).

    Attributes:
        k: Step index.
        x: Full state x_k.
        y: Full observation y_k (``None`` in state feedback).
        u_prev: Joint action u_{k-1} (``None`` at k = 0).
    """
    k: int
    x: np.ndarray
    y: Optional[np.ndarray] = None
    u_prev: Optional[np.ndarray] = None


class ControllerPolicy(ABC):
    """Closed-loop law of one controller."""

    def __init__(self, index: int):
        self.index = index

    def initial_state(self) -> Any:
        """Memory before the first step (``None`` for memoryless laws)."""
        return None

    @abstractmethod
    def act(self, state: Any, view: StepView) -> Tuple[np.ndarray, Any]:
        """Return (u_k^i, new state)."""
        pass

    def local_estimate(self, state: Any, view: StepView) -> Optional[np.ndarray]:
        """The d_x vector this controller keeps as its share of the state estimate, if any."""
        return None


# ================================================================
# Profiles
# ================================================================

@dataclass(frozen=True, eq=False)
class Synthesis:
    """Everything the strategies are built from.

    Attributes:
        model: Validated model.
        gains: Centralized LQR gains.
        filter: Kalman schedule (output feedback only).
        subs: Substitution maps and verdicts.
    """
    model: SystemModel
    gains: GainSchedule
    subs: SubstitutionSet
    filter: Optional[FilterSchedule] = None

    @classmethod
    def solve(cls, model: SystemModel) -> "Synthesis":
        return cls(
            model=model,
            gains=solve_centralized_lqr(model),
            subs=check_substitutable(model),
            filter=solve_kalman(model) if model.mode is FeedbackMode.OUTPUT else None,
        )


@dataclass(frozen=True)
class LinearForm:
    """One step of a linear profile: m_k = Phi m_{k-1} + J y~_k, u_k = D m_k."""
    Phi: np.ndarray
    J: np.ndarray
    D: np.ndarray


class StrategyProfile:
    """A policy and a declared information structure per controller.

    Subclasses build ``policies`` and ``information`` in ``__init__`` and,
    when the profile is linear, override ``memory_dim`` and ``linear_form``.
    """

    kind: StrategyKind

    def __init__(
        self,
        synthesis: Synthesis,
        policies: Tuple[ControllerPolicy, ...],
        information: Tuple[InformationStructure, ...],
    ):
        self.synthesis = synthesis
        self.policies = tuple(policies)
        self.information = tuple(information)
        if len(self.policies) != synthesis.model.n or len(self.information) != synthesis.model.n:
            raise ValueError(f"profile needs one policy and one information set per controller "
                             f"(n = {synthesis.model.n})")

    @property
    def model(self) -> SystemModel:
        return self.synthesis.model

    @property
    def gains(self) -> GainSchedule:
        return self.synthesis.gains

    @property
    def filter(self) -> Optional[FilterSchedule]:
        return self.synthesis.filter

    @property
    def subs(self) -> SubstitutionSet:
        return self.synthesis.subs

    @property
    def mode(self) -> FeedbackMode:
        return self.model.mode

    @property
    def reproduces_centralized(self) -> bool:
        """Whether B u and N u should equal the centralized law pathwise."""
        return False

    @property
    def is_linear(self) -> bool:
        return False

    @property
    def memory_dim(self) -> int:
        raise NonlinearProfileError(self.kind.value)

    def linear_form(self, k: int) -> LinearForm:
        raise NonlinearProfileError(self.kind.value)

    def with_information(self, information: Tuple[InformationStructure, ...]) -> "StrategyProfile":
        """Same laws, different declared information (for feasibility checks)."""
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.information = tuple(information)
        return clone

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind.value}, n={self.model.n}, T={self.model.horizon})"


def observed_dim(model: SystemModel) -> int:
    """Width of y~: d_y in output feedback, d_x in state feedback."""
    return model.dx if model.mode is FeedbackMode.STATE else model.dy


def control_rows(model: SystemModel, i: int, block: np.ndarray) -> np.ndarray:
    """d_u-row matrix that is ``block`` in controller i's rows and zero elsewhere."""
    out = np.zeros((model.du, block.shape[1]))
    out[model.controller_partition.slice(i)] = block
    return out

