"""System model and its validation.

``SystemModel`` holds the matrices of the linear plant

    x[t+1] = A x[t] + B u[t] + w[t]
    y[t]   = C x[t] + v[t]                  (output feedback only)
    c[t]   = |M x[t] + N u[t]|^2

together with the partitions that split controls, observations and the state
into per-controller blocks. Arrays are copied to read-only float64 on
construction, so a model can be shared freely once validated.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config.settings import settings
from model.errors import ModelValidationError, Violation, ViolationKind

MatrixLike = Union[np.ndarray, Sequence[Sequence[float]], float]


def _as_matrix(value: MatrixLike) -> np.ndarray:
    matrix = np.atleast_2d(np.array(value, dtype=float, copy=True))
    matrix.setflags(write=False)
    return matrix


class FeedbackMode(Enum):
    """Which signal the controllers observe."""
    STATE = "state-feedback"
    OUTPUT = "output-feedback"


@dataclass(frozen=True)
class Partition:
    """Split of a vector dimension into consecutive blocks.

    Attributes:
        sizes: Block widths, in order.

    Example:
        ```python
        part = Partition((2, 1))
        part.slice(1)          # slice(2, 3)
        part.split(np.arange(3))
        ```
    """
    sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(int(o) for o in np.concatenate(([0], np.cumsum(self.sizes)))[:-1])

    def slice(self, index: int) -> slice:
        """Index range of block ``index``."""
        start = self.offsets[index]
        return slice(start, start + self.sizes[index])

    def split(self, vector: np.ndarray) -> List[np.ndarray]:
        return [vector[self.slice(i)] for i in range(self.count)]

    def embed(self, index: int, block: np.ndarray) -> np.ndarray:
        """Full-length vector that is ``block`` in slot ``index`` and zero elsewhere."""
        out = np.zeros(self.total)
        out[self.slice(index)] = block
        return out


def _as_partition(value: Any) -> Optional[Partition]:
    if value is None or isinstance(value, Partition):
        return value
    return Partition(tuple(value))


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Linear-Gaussian plant with ``n`` controllers.

    Attributes:
        A: State transition, d_x x d_x.
        B: Control input, d_x x d_u; column blocks B^i per ``controller_partition``.
        M: Cost output (state part), d_c x d_x.
        N: Cost output (control part), d_c x d_u; same column blocks as ``B``.
        controller_partition: Split of the control vector into the n actions.
        horizon: Number of decision steps T.
        n: Number of controllers.
        Sigma_x: Covariance of the initial state.
        Sigma_w: Covariance of the process noise.
        state_partition: Split of the state into subsystem states X^i.
        C: Observation matrix, d_y x d_x; row blocks C^i. ``None`` means state feedback.
        observation_partition: Split of the observation into Y^i.
        Sigma_v: Covariance of the observation noise.
    """
    A: np.ndarray
    B: np.ndarray
    M: np.ndarray
    N: np.ndarray
    controller_partition: Partition
    horizon: int
    n: int
    Sigma_x: np.ndarray
    Sigma_w: np.ndarray
    state_partition: Optional[Partition] = None
    C: Optional[np.ndarray] = None
    observation_partition: Optional[Partition] = None
    Sigma_v: Optional[np.ndarray] = None
    _stacked: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("A", "B", "M", "N", "Sigma_x", "Sigma_w"):
            object.__setattr__(self, name, _as_matrix(getattr(self, name)))
        for name in ("C", "Sigma_v"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _as_matrix(value))
        for name in ("controller_partition", "state_partition", "observation_partition"):
            object.__setattr__(self, name, _as_partition(getattr(self, name)))
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "n", int(self.n))
        stacked = np.vstack([self.B, self.N]) if self.B.shape[1] == self.N.shape[1] else self.B
        stacked.setflags(write=False)
        object.__setattr__(self, "_stacked", stacked)

    # ================================================================
    # Dimensions
    # ================================================================

    @property
    def dx(self) -> int:
        return self.A.shape[0]

    @property
    def du(self) -> int:
        return self.B.shape[1]

    @property
    def dc(self) -> int:
        return self.M.shape[0]

    @property
    def dy(self) -> int:
        return 0 if self.C is None else self.C.shape[0]

    @property
    def mode(self) -> FeedbackMode:
        return FeedbackMode.STATE if self.C is None else FeedbackMode.OUTPUT

    # ================================================================
    # Blocks
    # ================================================================

    @property
    def stacked(self) -> np.ndarray:
        """The stacked input matrix [B; N]."""
        return self._stacked

    def B_block(self, i: int) -> np.ndarray:
        return self.B[:, self.controller_partition.slice(i)]

    def N_block(self, i: int) -> np.ndarray:
        return self.N[:, self.controller_partition.slice(i)]

    def stacked_block(self, i: int) -> np.ndarray:
        """[B^i; N^i]."""
        return self._stacked[:, self.controller_partition.slice(i)]

    def C_block(self, i: int) -> np.ndarray:
        if self.C is None or self.observation_partition is None:
            raise ValueError("state-feedback model has no observation blocks")
        return self.C[self.observation_partition.slice(i), :]

    # ================================================================
    # Comparison
    # ================================================================

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SystemModel):
            return NotImplemented
        for name in ("A", "B", "M", "N", "Sigma_x", "Sigma_w", "C", "Sigma_v"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if (mine is None) != (theirs is None):
                return False
            if mine is not None and not np.array_equal(mine, theirs):
                return False
        return (
            self.controller_partition == other.controller_partition
            and self.state_partition == other.state_partition
            and self.observation_partition == other.observation_partition
            and self.horizon == other.horizon
            and self.n == other.n
        )

    __hash__ = None  # type: ignore[assignment]


# ================================================================
# Validation
# ================================================================

def _check_shape(
    out: List[Violation], name: str, matrix: np.ndarray, rows: int, cols: int
) -> bool:
    if matrix.shape != (rows, cols):
        out.append(Violation(
            ViolationKind.DIMENSION_MISMATCH, name,
            f"shape {matrix.shape} != expected ({rows}, {cols})",
        ))
        return False
    return True


def _check_partition(
    out: List[Violation], name: str, part: Partition, total: int, blocks: int
) -> None:
    if any(size < 1 for size in part.sizes):
        out.append(Violation(
            ViolationKind.DIMENSION_MISMATCH, name, f"block sizes {part.sizes} must all be >= 1"
        ))
    if part.count != blocks:
        out.append(Violation(
            ViolationKind.PARTITION_ARITY, name, f"{part.count} blocks declared, n = {blocks}"
        ))
    if part.total != total:
        out.append(Violation(
            ViolationKind.DIMENSION_MISMATCH, name, f"block sizes sum to {part.total}, expected {total}"
        ))


def _check_finite(out: List[Violation], name: str, matrix: Optional[np.ndarray]) -> bool:
    if matrix is None or np.all(np.isfinite(matrix)):
        return True
    bad = int(np.count_nonzero(~np.isfinite(matrix)))
    out.append(Violation(ViolationKind.NOT_FINITE, name, f"{bad} NaN or infinite entries"))
    return False


def _check_covariance(out: List[Violation], name: str, sigma: np.ndarray) -> None:
    scale_inf = linalg.norm(sigma, np.inf)
    asym = linalg.norm(sigma - sigma.T, np.inf)
    if asym > settings.symmetry_rtol * scale_inf:
        out.append(Violation(
            ViolationKind.NOT_SYMMETRIC, name, f"|S - S^T|_inf = {asym:.3e}"
        ))
        return
    min_eig = float(linalg.eigvalsh(0.5 * (sigma + sigma.T))[0])
    if min_eig < -settings.psd_rtol * linalg.norm(sigma, 2):
        out.append(Violation(
            ViolationKind.NOT_PSD, name, f"minimum eigenvalue {min_eig:.3e} < 0"
        ))


def collect_violations(model: SystemModel) -> List[Violation]:
    """Run every model check and return the failures (empty when valid)."""
    out: List[Violation] = []
    dx = model.A.shape[0]
    du = model.B.shape[1]
    dc = model.M.shape[0]

    if model.n < 1:
        out.append(Violation(ViolationKind.PARTITION_ARITY, "n", f"n = {model.n} < 1"))
    if model.horizon < 1:
        out.append(Violation(ViolationKind.DIMENSION_MISMATCH, "horizon", f"T = {model.horizon} < 1"))

    finite = {
        name: _check_finite(out, name, getattr(model, name))
        for name in ("A", "B", "M", "N", "Sigma_x", "Sigma_w", "C", "Sigma_v")
    }

    _check_shape(out, "A", model.A, dx, dx)
    _check_shape(out, "B", model.B, dx, du)
    _check_shape(out, "M", model.M, dc, dx)
    _check_shape(out, "N", model.N, dc, du)
    _check_partition(out, "controller_partition", model.controller_partition, du, model.n)
    if model.state_partition is not None:
        _check_partition(out, "state_partition", model.state_partition, dx, model.n)

    if _check_shape(out, "Sigma_x", model.Sigma_x, dx, dx) and finite["Sigma_x"]:
        _check_covariance(out, "Sigma_x", model.Sigma_x)
    if _check_shape(out, "Sigma_w", model.Sigma_w, dx, dx) and finite["Sigma_w"]:
        _check_covariance(out, "Sigma_w", model.Sigma_w)

    output_fields = {
        "C": model.C,
        "observation_partition": model.observation_partition,
        "Sigma_v": model.Sigma_v,
    }
    present = [name for name, value in output_fields.items() if value is not None]
    if present and len(present) != len(output_fields):
        for name, value in output_fields.items():
            if value is None:
                out.append(Violation(
                    ViolationKind.MODE_MISMATCH, name,
                    f"missing while {', '.join(present)} given (mixed feedback modes)",
                ))
    elif present:
        C = model.C
        dy = C.shape[0]
        _check_shape(out, "C", C, dy, dx)
        _check_partition(out, "observation_partition", model.observation_partition, dy, model.n)
        if _check_shape(out, "Sigma_v", model.Sigma_v, dy, dy) and finite["Sigma_v"]:
            _check_covariance(out, "Sigma_v", model.Sigma_v)

    return out


def validate_model(raw: SystemModel) -> SystemModel:
    """Check every model invariant.

    Args:
        raw: Candidate model.

    Returns:
        The same model when every invariant holds. Validation never alters
        the model, so validating twice is a no-op.

    Raises:
        ModelValidationError: One or more checks failed; ``violations`` lists
            each failing field and check.
    """
    violations = collect_violations(raw)
    if violations:
        raise ModelValidationError(violations)
    return raw
