"""Exception hierarchy.

All errors raised by the library derive from ``LQGError`` so callers (the
CLI in particular) can separate domain failures from programming errors.
Model validation collects every failed check into ``Violation`` records
before raising, instead of stopping at the first one.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence


class LQGError(Exception):
    """Base class for all library errors."""

    def to_dict(self) -> Dict[str, Any]:
        """Single-line diagnostic payload used by the CLI."""
        return {"error": type(self).__name__, "message": str(self)}


class ViolationKind(Enum):
    """Failed model check category."""
    DIMENSION_MISMATCH = "DimensionMismatch"
    PARTITION_ARITY = "PartitionArity"
    NOT_SYMMETRIC = "NotSymmetric"
    NOT_PSD = "NotPSD"
    MODE_MISMATCH = "ModeMismatch"
    NOT_FINITE = "NotFinite"


@dataclass(frozen=True)
class Violation:
    """One failed invariant.

    Attributes:
        kind: Check category.
        field: Model field the check was run on (e.g. ``"Sigma_w"``).
        check: Human-readable description of what failed.
    """
    kind: ViolationKind
    field: str
    check: str

    def to_dict(self) -> Dict[str, str]:
        return {"kind": self.kind.value, "field": self.field, "check": self.check}


class ModelValidationError(LQGError):
    """The system model breaks one or more invariants."""

    def __init__(self, violations: Sequence[Violation]) -> None:
        self.violations: List[Violation] = list(violations)
        summary = "; ".join(f"{v.field}: {v.kind.value} ({v.check})" for v in self.violations)
        super().__init__(f"{len(self.violations)} model violation(s): {summary}")

    def kinds(self) -> List[ViolationKind]:
        return [v.kind for v in self.violations]

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["violations"] = [v.to_dict() for v in self.violations]
        return payload


class ScenarioParseError(LQGError):
    """Scenario file is unreadable, malformed or incomplete."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ) -> None:
        self.path = path
        self.line = line
        self.field = field
        context = []
        if path:
            context.append(str(path))
        if line is not None:
            context.append(f"line {line}")
        if field:
            context.append(f"field '{field}'")
        prefix = f"{', '.join(context)}: " if context else ""
        super().__init__(f"{prefix}{message}")

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload.update({"path": self.path, "line": self.line, "field": self.field})
        return payload


class NotSubstitutableError(LQGError):
    """An operation needs open-loop substitutability and the model lacks it.

    Attributes:
        controllers: Indices of controllers that cannot substitute for the others.
        report: Optional partial result computed before the refusal.
    """

    def __init__(self, controllers: Sequence[int], report: Any = None) -> None:
        self.controllers = list(controllers)
        self.report = report
        super().__init__(
            f"controllers {self.controllers} cannot substitute for the others in open loop"
        )

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["controllers"] = self.controllers
        return payload


class RankFailureError(LQGError):
    """The random generator could not meet its rank conditions."""

    def __init__(self, attempts: int) -> None:
        self.attempts = attempts
        super().__init__(f"rank conditions not met after {attempts} attempts")


class MissingPartitionError(LQGError):
    """A block operation needs a partition the model does not declare."""

    def __init__(self, partition: str) -> None:
        self.partition = partition
        super().__init__(f"model has no {partition}")


class SingularInnovationError(LQGError):
    """Innovation covariance of the filter is (numerically) singular."""

    def __init__(self, step: int, condition: float) -> None:
        self.step = step
        self.condition = condition
        super().__init__(f"innovation covariance at step {step} has condition {condition:.3e}")


class SingularObservationCovarianceError(LQGError):
    """Joint observation covariance of the batch oracle is singular."""

    def __init__(self, condition: float) -> None:
        self.condition = condition
        super().__init__(f"observation covariance has condition {condition:.3e}")


class InfeasibleStrategyError(LQGError):
    """A strategy reads a signal outside its declared information set."""

    def __init__(self, controller: int, step: int, signal: str) -> None:
        self.controller = controller
        self.step = step
        self.signal = signal
        super().__init__(
            f"controller {controller} at step {step} depends on undeclared signal {signal}"
        )

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload.update({"controller": self.controller, "step": self.step, "signal": self.signal})
        return payload


class NonlinearProfileError(LQGError):
    """Exact cost evaluation was requested for a profile with no linear form."""

    def __init__(self, kind: str) -> None:
        self.kind = kind
        super().__init__(f"profile '{kind}' has no linear closed-loop form")
