"""Monte Carlo cost estimates."""
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from model.system import SystemModel
from sim.engine import SimulationTrace, simulate
from strategies.base import StrategyProfile

# two-sided 95% normal quantile
Z_95 = 1.96


class MonteCarloEstimate(BaseModel):
    """Sample mean of total cost with its standard error and 95% CI."""
    runs: int
    mean: float
    std_error: float
    half_width: float
    ci_low: float
    ci_high: float


def estimate_from_costs(costs: Sequence[float]) -> MonteCarloEstimate:
    """Mean, SE (ddof = 1) and CI half-width 1.96 SE of per-run costs.

    Raises:
        ValueError: Fewer than two runs.
    """
    values = np.asarray(costs, dtype=float)
    if values.size < 2:
        raise ValueError(f"need at least 2 runs for a standard error, got {values.size}")
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / np.sqrt(values.size))
    half = Z_95 * se
    return MonteCarloEstimate(
        runs=int(values.size), mean=mean, std_error=se,
        half_width=half, ci_low=mean - half, ci_high=mean + half,
    )


def monte_carlo_cost(
    model: SystemModel,
    profile: StrategyProfile,
    seed: int,
    runs: int,
    jobs: int = 1,
    traces: Optional[Sequence[SimulationTrace]] = None,
) -> MonteCarloEstimate:
    """Estimate the expected total cost from ``runs`` seeded simulations.

    Args:
        model: Model.
        profile: Profile to evaluate.
        seed: Base seed; deterministic given the seed.
        runs: Number of runs (>= 2).
        jobs: Worker threads for the simulations.
        traces: Already simulated traces to reuse instead of simulating.
    """
    if traces is None:
        if runs < 2:
            raise ValueError(f"need at least 2 runs for a standard error, got {runs}")
        traces = simulate(model, profile, seed=seed, runs=runs, jobs=jobs)
    return estimate_from_costs([trace.total_cost for trace in traces])
