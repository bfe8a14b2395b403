"""Small linear-algebra helpers shared by the solvers."""
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from config.settings import settings


def pinv(matrix: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse by SVD.

    Singular values below ``sigma_max * rtol`` are treated as zero.
    """
    rtol = settings.pinv_rtol if rtol is None else rtol
    if matrix.size == 0:
        return np.zeros(matrix.shape[::-1])
    return linalg.pinv(matrix, atol=0.0, rtol=rtol)


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def psd_floor(matrix: np.ndarray) -> np.ndarray:
    """Symmetric part of ``matrix`` with negative eigenvalues clamped to zero."""
    sym = symmetrize(matrix)
    if sym.size == 0:
        return sym
    eigvals, eigvecs = linalg.eigh(sym)
    if eigvals[0] >= 0.0:
        return sym
    return symmetrize((eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T)


def covariance_factor(sigma: np.ndarray) -> np.ndarray:
    """Return F with F F^T = sigma, tolerating singular (PSD) input."""
    if sigma.size == 0:
        return np.zeros_like(sigma)
    eigvals, eigvecs = linalg.eigh(symmetrize(sigma))
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def condition(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = float(np.linalg.cond(matrix))
    return np.inf if np.isnan(cond) else cond


def is_well_conditioned(matrix: np.ndarray) -> Tuple[bool, float]:
    cond = condition(matrix)
    return bool(np.isfinite(cond) and cond <= settings.cond_limit), cond


def max_abs(matrix: np.ndarray) -> float:
    """Largest absolute entry (0 for empty input)."""
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0
