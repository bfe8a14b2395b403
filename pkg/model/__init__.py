"""model - plant description, scenario files and the error hierarchy.

┌──────────────────────────────────────────────┐
│  scenario.py   ScenarioConfig / JSON I/O     │  ← load_scenario, save_scenario
├──────────────────────────────────────────────┤
│  system.py     SystemModel / Partition       │  ← validate_model
├──────────────────────────────────────────────┤
│  errors.py     LQGError hierarchy            │
└──────────────────────────────────────────────┘

Quick start:
    ```python
    from model import load_scenario

    config = load_scenario("scenarios/sum.json")
    model = config.model          # validated, read-only
    ```
"""
from model.errors import (
    InfeasibleStrategyError,
    LQGError,
    MissingPartitionError,
    ModelValidationError,
    NonlinearProfileError,
    NotSubstitutableError,
    RankFailureError,
    ScenarioParseError,
    SingularInnovationError,
    SingularObservationCovarianceError,
    Violation,
    ViolationKind,
)
from model.scenario import (
    ScenarioConfig,
    StrategyKind,
    load_scenario,
    parse_scenario,
    save_scenario,
    scenario_to_dict,
)
from model.system import (
    FeedbackMode,
    Partition,
    SystemModel,
    collect_violations,
    validate_model,
)

__all__ = [
    # system
    "FeedbackMode",
    "Partition",
    "SystemModel",
    "collect_violations",
    "validate_model",
    # scenario
    "ScenarioConfig",
    "StrategyKind",
    "load_scenario",
    "parse_scenario",
    "save_scenario",
    "scenario_to_dict",
    # errors
    "LQGError",
    "Violation",
    "ViolationKind",
    "ModelValidationError",
    "ScenarioParseError",
    "NotSubstitutableError",
    "RankFailureError",
    "MissingPartitionError",
    "SingularInnovationError",
    "SingularObservationCovarianceError",
    "InfeasibleStrategyError",
    "NonlinearProfileError",
]
