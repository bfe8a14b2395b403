"""Centralized versus decentralized cost comparison.

``compare`` evaluates, for the model's feedback mode, the centralized
optimal profile, the decentralized profile and the zero baseline, each both
exactly and by Monte Carlo under common noise, and reports:

- the largest per-run gap |c_dec - c_cen| / (1 + c_cen),
- the relative gap of the exact costs,
- the largest estimate-split and superposition residuals seen,
- whether the centralized cost bounds every other profile from below.
"""
import csv
from pathlib import Path
from typing import List, Optional, Union

from loguru import logger
from pydantic import BaseModel

from analysis.exact import exact_expected_cost
from analysis.montecarlo import MonteCarloEstimate, monte_carlo_cost
from model.errors import NotSubstitutableError
from model.scenario import StrategyKind
from model.system import FeedbackMode, SystemModel
from sim.engine import simulate
from strategies import Synthesis, create_profile

PATHWISE_RTOL = 1e-8
EXACT_RTOL = 1e-9
ESTIMATE_RTOL = 1e-8

_KINDS = {
    FeedbackMode.STATE: (StrategyKind.CENTRALIZED_SF, StrategyKind.DECENTRALIZED_SF),
    FeedbackMode.OUTPUT: (StrategyKind.CENTRALIZED_OF, StrategyKind.DECENTRALIZED_OF),
}


class ProfileCost(BaseModel):
    profile: str
    exact: float
    monte_carlo: MonteCarloEstimate


class PairedCost(BaseModel):
    run: int
    centralized: float
    decentralized: float
    gap: float


class CostReport(BaseModel):
    """Comparison result; decentralized fields are ``None`` in a partial report."""
    mode: str
    seed: int
    runs: int
    substitutable: bool
    failing_controllers: List[int]
    centralized: ProfileCost
    decentralized: Optional[ProfileCost] = None
    baseline: Optional[ProfileCost] = None
    pathwise_max_gap: Optional[float] = None
    exact_relative_gap: Optional[float] = None
    estimate_max_residual: Optional[float] = None
    superposition_max_residual: Optional[float] = None
    pathwise_equal: Optional[bool] = None
    exact_equal: Optional[bool] = None
    lower_bound_holds: Optional[bool] = None
    baseline_strictly_worse: Optional[bool] = None
    paired: List[PairedCost] = []

    @property
    def verdict(self) -> bool:
        """Decentralized cost equals centralized, pathwise and exactly."""
        return bool(self.substitutable and self.pathwise_equal and self.exact_equal
                    and self.lower_bound_holds)


def compare(model: SystemModel, seed: int, runs: int, jobs: int = 1) -> CostReport:
    """Run the centralized/decentralized/zero comparison.

    Args:
        model: Validated model.
        seed: Common-noise seed.
        runs: Monte Carlo runs per profile (>= 2).
        jobs: Worker threads.

    Returns:
        Full ``CostReport``.

    Raises:
        NotSubstitutableError: The model is not substitutable; ``report``
            holds a partial ``CostReport`` with the centralized costs.
    """
    synthesis = Synthesis.solve(model)
    cen_kind, dec_kind = _KINDS[model.mode]

    cen = create_profile(cen_kind, model, synthesis)
    cen_traces = simulate(model, cen, seed=seed, runs=runs, jobs=jobs)
    cen_exact = exact_expected_cost(model, cen)
    centralized = ProfileCost(
        profile=cen_kind.value, exact=cen_exact,
        monte_carlo=monte_carlo_cost(model, cen, seed, runs, traces=cen_traces),
    )

    if not synthesis.subs.substitutable:
        failing = synthesis.subs.failing()
        partial = CostReport(
            mode=model.mode.value, seed=seed, runs=runs,
            substitutable=False, failing_controllers=failing,
            centralized=centralized,
        )
        logger.warning(f"compare: controllers {failing} not substitutable; "
                       f"reporting centralized cost only")
        raise NotSubstitutableError(failing, report=partial)

    dec = create_profile(dec_kind, model, synthesis)
    dec_traces = simulate(model, dec, seed=seed, runs=runs, jobs=jobs)
    dec_exact = exact_expected_cost(model, dec)
    decentralized = ProfileCost(
        profile=dec_kind.value, exact=dec_exact,
        monte_carlo=monte_carlo_cost(model, dec, seed, runs, traces=dec_traces),
    )

    zero = create_profile(StrategyKind.ZERO, model, synthesis)
    zero_exact = exact_expected_cost(model, zero)
    baseline = ProfileCost(
        profile=StrategyKind.ZERO.value, exact=zero_exact,
        monte_carlo=monte_carlo_cost(model, zero, seed, runs, jobs=jobs),
    )

    paired = []
    for c, d in zip(cen_traces, dec_traces):
        gap = abs(d.total_cost - c.total_cost) / (1.0 + c.total_cost)
        paired.append(PairedCost(run=c.run, centralized=c.total_cost,
                                 decentralized=d.total_cost, gap=gap))
    pathwise = max(p.gap for p in paired)
    scale = 1.0 + cen_exact
    exact_gap = abs(dec_exact - cen_exact) / scale
    estimate_res = [t.estimate_residual for t in dec_traces if t.estimate_residual is not None]
    super_res = [t.superposition_residual for t in dec_traces if t.superposition_residual is not None]
    estimate_max = max(estimate_res) if estimate_res else None

    report = CostReport(
        mode=model.mode.value, seed=seed, runs=runs,
        substitutable=True, failing_controllers=[],
        centralized=centralized, decentralized=decentralized, baseline=baseline,
        pathwise_max_gap=pathwise,
        exact_relative_gap=exact_gap,
        estimate_max_residual=estimate_max,
        superposition_max_residual=max(super_res) if super_res else None,
        pathwise_equal=pathwise <= PATHWISE_RTOL and (estimate_max is None or estimate_max <= ESTIMATE_RTOL),
        exact_equal=exact_gap <= EXACT_RTOL,
        lower_bound_holds=(
            dec_exact >= cen_exact - EXACT_RTOL * scale
            and zero_exact >= cen_exact - EXACT_RTOL * scale
        ),
        baseline_strictly_worse=zero_exact > cen_exact + EXACT_RTOL * scale,
        paired=paired,
    )
    logger.info(f"compare ({model.mode.value}): exact {cen_exact:.6g} vs {dec_exact:.6g}, "
                f"pathwise gap {pathwise:.3e}")
    return report


def save_paired_costs(report: CostReport, path: Union[str, Path]) -> Path:
    """CSV ``run,centralized,decentralized,gap`` of the per-run paired costs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("run", "centralized", "decentralized", "gap"))
        for p in report.paired:
            writer.writerow((p.run, repr(p.centralized), repr(p.decentralized), repr(p.gap)))
    return path
