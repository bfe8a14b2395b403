"""Black-box information-feasibility check.

For every controller, every undeclared signal block at every time is
perturbed on a recorded trajectory and the controller's policy is replayed
open loop on the perturbed history. If any action at a step where that
signal was not declared moves by more than ``feasibility_atol``, the policy
reads information it does not have.

A signal atom is one block of one signal at one time: x^j_tau (state
partition block j), y^j_tau (observation block j) or u^j_tau (controller j's
action). Without a state partition the whole state is a single block 0.
"""
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel

from config.settings import settings
from model.errors import InfeasibleStrategyError
from model.system import FeedbackMode, SystemModel
from strategies.base import ControllerPolicy, InformationStructure, SignalKind, StepView, StrategyProfile

Atom = Tuple[SignalKind, int, slice, int]


class FeasibilityViolation(BaseModel):
    controller: int
    step: int
    signal: str
    change: float


class FeasibilityReport(BaseModel):
    """Outcome of ``check_information_feasibility``.

    Attributes:
        profile: Profile kind checked.
        feasible: No violation found.
        declared: Declared information per controller, human readable.
        atoms_checked: Perturbations replayed per controller and run.
        runs: Recorded trajectories used.
        violations: First offending step for every (controller, signal) pair.
    """
    profile: str
    feasible: bool
    declared: List[str]
    atoms_checked: int
    runs: int
    violations: List[FeasibilityViolation]

    def raise_if_infeasible(self) -> "FeasibilityReport":
        if self.violations:
            first = self.violations[0]
            raise InfeasibleStrategyError(first.controller, first.step, first.signal)
        return self


def signal_name(kind: SignalKind, owner: int, tau: int) -> str:
    return f"{kind.value}{owner}[{tau}]"


def iter_atoms(model: SystemModel) -> Iterator[Atom]:
    """Every (kind, block, slice, time) a policy could read."""
    T = model.horizon
    state_blocks = (
        [model.state_partition.slice(j) for j in range(model.n)]
        if model.state_partition is not None else [slice(0, model.dx)]
    )
    for tau in range(T):
        for j, block in enumerate(state_blocks):
            yield SignalKind.STATE, j, block, tau
        if model.mode is FeedbackMode.OUTPUT:
            for j in range(model.n):
                yield SignalKind.OBSERVATION, j, model.observation_partition.slice(j), tau
        if tau < T - 1:
            for j in range(model.n):
                yield SignalKind.CONTROL, j, model.controller_partition.slice(j), tau


def replay(
    policy: ControllerPolicy,
    x: np.ndarray,
    y: Optional[np.ndarray],
    u: np.ndarray,
) -> List[np.ndarray]:
    """Actions the policy takes along a fixed recorded history."""
    state = policy.initial_state()
    actions = []
    for k in range(x.shape[0]):
        view = StepView(
            k=k,
            x=x[k],
            y=None if y is None else y[k],
            u_prev=u[k - 1] if k > 0 else None,
        )
        action, state = policy.act(state, view)
        actions.append(action)
    return actions


def _first_step(kind: SignalKind, tau: int) -> int:
    return tau + 1 if kind is SignalKind.CONTROL else tau


def check_information_feasibility(
    profile: StrategyProfile,
    model: SystemModel,
    traces: Optional[Sequence] = None,
    information: Optional[Sequence[InformationStructure]] = None,
    seed: int = settings.default_seed,
    runs: int = 2,
    strict: bool = False,
) -> FeasibilityReport:
    """Check that each policy depends only on its declared information.

    Args:
        profile: Profile whose policies are replayed.
        model: The model the profile was built for.
        traces: Recorded ``SimulationTrace`` objects; simulated with
            ``seed``/``runs`` when omitted.
        information: Declared sets to check against instead of the
            profile's own.
        seed: Seed for recording trajectories and drawing perturbations.
        runs: Trajectories to record when ``traces`` is omitted.
        strict: Raise instead of returning a failing report.

    Returns:
        ``FeasibilityReport``.

    Raises:
        InfeasibleStrategyError: ``strict`` and a violation was found.
        ValueError: ``profile`` belongs to a different model.
    """
    if not model == profile.model:
        raise ValueError("profile was built for a different model")
    declared = tuple(information) if information is not None else profile.information
    if traces is None:
        from sim.engine import simulate

        traces = simulate(model, profile, seed=seed, runs=runs)

    rng = np.random.default_rng(seed)
    atoms = list(iter_atoms(model))
    violations: List[FeasibilityViolation] = []
    seen = set()

    for trace in traces:
        signals = {SignalKind.STATE: trace.x, SignalKind.OBSERVATION: trace.y, SignalKind.CONTROL: trace.u}
        for i, policy in enumerate(profile.policies):
            info = declared[i]
            baseline = replay(policy, trace.x, trace.y, trace.u)
            for kind, owner, block, tau in atoms:
                name = signal_name(kind, owner, tau)
                if (i, name) in seen:
                    continue
                steps = [
                    k for k in range(_first_step(kind, tau), model.horizon)
                    if not info.allows(kind, owner, tau, k)
                ]
                if not steps:
                    continue
                perturbed = {key: None if arr is None else np.array(arr) for key, arr in signals.items()}
                target = perturbed[kind]
                width = block.stop - block.start
                target[tau, block] += (1.0 + np.abs(target[tau, block])) * rng.standard_normal(width)
                moved = replay(
                    policy,
                    perturbed[SignalKind.STATE],
                    perturbed[SignalKind.OBSERVATION],
                    perturbed[SignalKind.CONTROL],
                )
                for k in steps:
                    change = float(np.max(np.abs(moved[k] - baseline[k]), initial=0.0))
                    scale = 1.0 + float(np.max(np.abs(baseline[k]), initial=0.0))
                    if change > settings.feasibility_atol * scale:
                        seen.add((i, name))
                        violations.append(FeasibilityViolation(
                            controller=i, step=k, signal=name, change=change,
                        ))
                        break

    report = FeasibilityReport(
        profile=profile.kind.value,
        feasible=not violations,
        declared=[info.describe() for info in declared],
        atoms_checked=len(atoms),
        runs=len(traces),
        violations=violations,
    )
    if violations:
        logger.info(f"Profile {report.profile}: {len(violations)} undeclared dependencies")
    else:
        logger.debug(f"Profile {report.profile} is feasible under its declared information")
    if strict:
        report.raise_if_infeasible()
    return report
