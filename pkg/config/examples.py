"""Built-in reference models.

Each example is an ``ExampleModel`` subclass; ``EXAMPLES`` maps the names
accepted by ``generate --example`` to instances. To add one:

1. Subclass ``ExampleModel`` and implement ``name``, ``description`` and ``build()``
2. Register an instance in ``EXAMPLES``
"""
from abc import ABC, abstractmethod
from typing import Dict, List

import numpy as np

from model.system import Partition, SystemModel, validate_model


class ExampleModel(ABC):
    """A named, fully specified model."""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        pass

    @abstractmethod
    def build(self) -> SystemModel:
        """Return the validated model."""
        pass


class SumOfActions(ExampleModel):
    """Two scalar controllers whose actions only matter through their sum.

    B = [b0 b0] and N = [n0 n0], so either controller can play
    v = u^1 + u^2 on its own. Subsystem i is state component i.

    Args:
        output_feedback: Add a noisy per-controller measurement of its own
            state component.
        horizon: Decision steps T.
    """

    def __init__(self, output_feedback: bool = False, horizon: int = 5):
        self.output_feedback = output_feedback
        self.horizon = horizon

    @property
    def name(self) -> str:
        return "sum-of" if self.output_feedback else "sum-sf"

    @property
    def description(self) -> str:
        mode = "output feedback" if self.output_feedback else "state feedback"
        return f"two controllers acting through u^1 + u^2 ({mode})"

    def build(self) -> SystemModel:
        b0 = np.array([[1.0], [0.5]])
        n0 = np.array([[0.0], [0.0], [1.0]])
        extra = {}
        if self.output_feedback:
            extra = dict(
                C=np.eye(2),
                observation_partition=Partition((1, 1)),
                Sigma_v=0.1 * np.eye(2),
            )
        return validate_model(SystemModel(
            A=np.array([[1.0, 0.1], [0.0, 0.9]]),
            B=np.hstack([b0, b0]),
            M=np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
            N=np.hstack([n0, n0]),
            controller_partition=Partition((1, 1)),
            horizon=self.horizon,
            n=2,
            Sigma_x=np.eye(2),
            Sigma_w=0.1 * np.eye(2),
            state_partition=Partition((1, 1)),
            **extra,
        ))


class ScalarLQR(ExampleModel):
    """x' = x + u with stage cost x^2 + u^2 over two steps.

    The optimal gains are K = (-0.5, 0) with value 1.5 x^2 at the first step.
    """

    @property
    def name(self) -> str:
        return "scalar"

    @property
    def description(self) -> str:
        return "single scalar controller, cost x^2 + u^2, T = 2"

    def build(self) -> SystemModel:
        return validate_model(SystemModel(
            A=[[1.0]], B=[[1.0]],
            M=[[1.0], [0.0]], N=[[0.0], [1.0]],
            controller_partition=Partition((1,)),
            horizon=2, n=1,
            Sigma_x=[[1.0]], Sigma_w=[[0.0]],
            state_partition=Partition((1,)),
        ))


EXAMPLES: Dict[str, ExampleModel] = {
    example.name: example
    for example in (SumOfActions(), SumOfActions(output_feedback=True), ScalarLQR())
}


def example_names() -> List[str]:
    return sorted(EXAMPLES)


def get_example(name: str) -> SystemModel:
    """Build a registered example by name.

    Raises:
        KeyError: Unknown example name.
    """
    try:
        return EXAMPLES[name].build()
    except KeyError:
        raise KeyError(f"unknown example '{name}', choose from {example_names()}") from None


def describe_examples() -> str:
    """One ``name: description`` entry per example, for help text."""
    return "; ".join(f"{name}: {EXAMPLES[name].description}" for name in example_names())
