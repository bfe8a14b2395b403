"""Open-loop substitutability and the substitution maps.

Controller i can stand in for all controllers in open loop when, for every
joint action u, some v^i gives

    B u = B^i v^i   and   N u = N^i v^i.

Stacking P_i = [B^i; N^i] and S = [B; N] this is P_i v^i = S u, solved with
the minimum-norm choice v^i = Lambda^i u, Lambda^i = pinv(P_i) S. The
verdict is numerical: controller i qualifies when P_i Lambda^i reproduces S
within ``tol_sub = substitution_rtol * (1 + |S|_inf)``.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel
from scipy import linalg

from config.settings import settings
from control.linalg import max_abs, pinv
from model.errors import NotSubstitutableError
from model.system import SystemModel


class ControllerVerdict(BaseModel):
    index: int
    substitutable: bool
    residual: float


class SubstitutionReport(BaseModel):
    """JSON view of a ``SubstitutionSet``."""
    substitutable: bool
    tolerance: float
    controllers: List[ControllerVerdict]
    pairwise_residuals: List[List[float]]
    lambdas: List[List[List[float]]]


def substitution_tolerance(model: SystemModel) -> float:
    return settings.substitution_rtol * (1.0 + float(linalg.norm(model.stacked, np.inf)))


def substitution_map(model: SystemModel, i: int) -> np.ndarray:
    """Lambda^i = pinv([B^i; N^i]) [B; N], shape d_u^i x d_u.

    Args:
        model: Validated model.
        i: Controller index, 0-based.
    """
    if not 0 <= i < model.n:
        raise IndexError(f"controller index {i} out of range for n = {model.n}")
    return pinv(model.stacked_block(i)) @ model.stacked


def _range_residual(block: np.ndarray, target: np.ndarray) -> float:
    """Largest entry of target - block pinv(block) target."""
    return max_abs(target - block @ (pinv(block) @ target))


@dataclass(frozen=True, eq=False)
class SubstitutionSet:
    """Substitution maps and verdicts for every controller.

    Attributes:
        model: The model the maps were computed for.
        lambdas: Lambda^i per controller.
        residuals: max_j |S e_j - P_i Lambda^i e_j|_inf per controller.
        tolerance: tol_sub used for the verdicts.
        pairwise: ``pairwise[i, j]`` is the residual of controller i
            replacing controller j alone (range of P_j inside range of P_i).
    """
    model: SystemModel
    lambdas: Tuple[np.ndarray, ...]
    residuals: Tuple[float, ...]
    tolerance: float
    pairwise: np.ndarray

    @property
    def flags(self) -> Tuple[bool, ...]:
        return tuple(r <= self.tolerance for r in self.residuals)

    @property
    def substitutable(self) -> bool:
        return all(self.flags)

    def is_substitutable(self, i: int) -> bool:
        return self.flags[i]

    def failing(self) -> List[int]:
        return [i for i, ok in enumerate(self.flags) if not ok]

    def require(self) -> "SubstitutionSet":
        """Return self, or raise ``NotSubstitutableError`` naming the failing controllers."""
        if not self.substitutable:
            raise NotSubstitutableError(self.failing())
        return self

    def apply(self, u: np.ndarray, i: int) -> np.ndarray:
        return apply_substitution(self, u, i)

    def to_report(self) -> SubstitutionReport:
        return SubstitutionReport(
            substitutable=self.substitutable,
            tolerance=self.tolerance,
            controllers=[
                ControllerVerdict(index=i, substitutable=ok, residual=r)
                for i, (ok, r) in enumerate(zip(self.flags, self.residuals))
            ],
            pairwise_residuals=self.pairwise.tolist(),
            lambdas=[lam.tolist() for lam in self.lambdas],
        )


def check_substitutable(model: SystemModel) -> SubstitutionSet:
    """Compute every Lambda^i and decide substitutability per controller.

    The model is substitutable overall when all n residuals are within
    tolerance, i.e. range([B; N]) lies in range([B^i; N^i]) for every i.
    """
    tol = substitution_tolerance(model)
    lambdas = []
    residuals = []
    for i in range(model.n):
        lam = substitution_map(model, i)
        lam.setflags(write=False)
        lambdas.append(lam)
        residuals.append(max_abs(model.stacked - model.stacked_block(i) @ lam))

    pairwise = np.zeros((model.n, model.n))
    for i in range(model.n):
        for j in range(model.n):
            if i != j:
                pairwise[i, j] = _range_residual(model.stacked_block(i), model.stacked_block(j))
    pairwise.setflags(write=False)

    subs = SubstitutionSet(
        model=model,
        lambdas=tuple(lambdas),
        residuals=tuple(residuals),
        tolerance=tol,
        pairwise=pairwise,
    )
    if subs.substitutable:
        logger.debug(f"All {model.n} controllers substitutable (max residual {max(residuals):.3e})")
    else:
        logger.warning(f"Controllers {subs.failing()} cannot substitute for the others "
                       f"(tolerance {tol:.3e})")
    return subs


def apply_substitution(subs: SubstitutionSet, u: np.ndarray, i: int) -> np.ndarray:
    """Action v^i = Lambda^i u of controller i that replicates the joint action u.

    Raises:
        NotSubstitutableError: Controller i cannot replicate arbitrary joint actions.
    """
    if not subs.is_substitutable(i):
        raise NotSubstitutableError([i])
    u = np.asarray(u, dtype=float)
    v = subs.lambdas[i] @ u
    model = subs.model
    bound = subs.tolerance * (1.0 + max_abs(u))
    gap = max(
        max_abs(model.B @ u - model.B_block(i) @ v),
        max_abs(model.N @ u - model.N_block(i) @ v),
    )
    if gap > bound:
        raise NotSubstitutableError([i])
    return v
