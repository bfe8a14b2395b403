"""strategies - closed-loop profiles and their information structures.

Architecture:
    StrategyProfile (base.py)            ← policies + declared information
    ├── CentralizedSFProfile             ← u = K_k x_k
    ├── CentralizedOFProfile             ← u = K_k z_k
    ├── DecentralizedSFProfile           ← u^i = Lambda^i K_k^i x_k^i
    ├── DecentralizedOFProfile           ← u^i = Lambda^i K_k s_k^i
    ├── ZeroProfile                      ← u = 0
    └── LeaderProfile                    ← u^l = Lambda^l K_k x_k (or z_k), others 0

    feasibility.py                       ← perturbation check of declared information

Every profile shares one ``Synthesis`` (LQR gains, Kalman schedule,
substitution maps), so profiles built from the same synthesis are directly
comparable.

Adding a profile:
    1. Subclass StrategyProfile, build one ControllerPolicy per controller
    2. Override ``linear_form`` if the law is linear in a finite memory
    3. Register it in ``create_profile()`` below
"""
from typing import Optional, Union

from model.scenario import StrategyKind
from model.system import SystemModel
from strategies.base import (
    ControllerPolicy,
    InformationStructure,
    LinearForm,
    SignalAccess,
    SignalKind,
    StepView,
    StrategyProfile,
    Synthesis,
)
from strategies.baseline import LeaderProfile, ZeroPolicy, ZeroProfile
from strategies.centralized import (
    CentralizedOFProfile,
    CentralizedSFProfile,
    FilterPolicy,
    StateFeedbackPolicy,
)
from strategies.decentralized import (
    DecentralizedOFPolicy,
    DecentralizedOFProfile,
    DecentralizedSFPolicy,
    DecentralizedSFProfile,
    decentralized_of_action,
    decentralized_sf_action,
    initial_local_estimate,
    local_estimate_update,
)
from strategies.feasibility import (
    FeasibilityReport,
    FeasibilityViolation,
    check_information_feasibility,
)

__all__ = [
    # base
    "ControllerPolicy",
    "InformationStructure",
    "LinearForm",
    "SignalAccess",
    "SignalKind",
    "StepView",
    "StrategyProfile",
    "Synthesis",
    # profiles
    "CentralizedSFProfile",
    "CentralizedOFProfile",
    "DecentralizedSFProfile",
    "DecentralizedOFProfile",
    "ZeroProfile",
    "LeaderProfile",
    # policies
    "StateFeedbackPolicy",
    "FilterPolicy",
    "DecentralizedSFPolicy",
    "DecentralizedOFPolicy",
    "ZeroPolicy",
    # decentralized laws
    "decentralized_sf_action",
    "decentralized_of_action",
    "initial_local_estimate",
    "local_estimate_update",
    # feasibility
    "FeasibilityReport",
    "FeasibilityViolation",
    "check_information_feasibility",
    "create_profile",
]

_PROFILES = {
    StrategyKind.CENTRALIZED_SF: CentralizedSFProfile,
    StrategyKind.CENTRALIZED_OF: CentralizedOFProfile,
    StrategyKind.DECENTRALIZED_SF: DecentralizedSFProfile,
    StrategyKind.DECENTRALIZED_OF: DecentralizedOFProfile,
    StrategyKind.ZERO: ZeroProfile,
}


def create_profile(
    kind: Union[StrategyKind, str],
    model: SystemModel,
    synthesis: Optional[Synthesis] = None,
    leader: Optional[int] = None,
) -> StrategyProfile:
    """Factory for strategy profiles.

    Args:
        kind: Profile kind or its string value (``"decentralized-of"`` ...).
        model: Validated model.
        synthesis: Reuse already solved schedules; solved from ``model``
            when omitted.
        leader: Acting controller of the leader profile (default 0).

    Returns:
        StrategyProfile instance.

    Raises:
        ValueError: Unknown kind, or ``synthesis`` solved for another model.
        ModelValidationError: Profile does not fit the model's feedback mode.
        NotSubstitutableError: Decentralized or leader profile on a model
            that lacks substitutability.
        MissingPartitionError: Decentralized state feedback without a state partition.

    Examples:
        ```python
        synthesis = Synthesis.solve(model)
        cen = create_profile("centralized-of", model, synthesis)
        dec = create_profile("decentralized-of", model, synthesis)
        lead = create_profile(StrategyKind.LEADER, model, synthesis, leader=1)
        ```
    """
    kind = StrategyKind(kind)
    if synthesis is None:
        synthesis = Synthesis.solve(model)
    elif synthesis.model != model:
        raise ValueError("synthesis was solved for a different model")

    if kind is StrategyKind.LEADER:
        return LeaderProfile(synthesis, leader=0 if leader is None else leader)
    return _PROFILES[kind](synthesis)
