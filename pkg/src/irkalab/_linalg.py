"""Small dense linear-algebra helpers used throughout the package."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

#: Reciprocal condition estimate below which a shifted solve is rejected.
SHIFT_RCOND_FLOOR = 1e-14


class ShiftedSolver:
    """LU factorization of a matrix with a cached reciprocal condition estimate.

    The factorization is reused for repeated solves against the same matrix
    and for transpose solves, so each interpolation point costs one LU.
    """

    def __init__(self, m: np.ndarray):
        m = np.ascontiguousarray(m)
        anorm = np.linalg.norm(m, 1)
        self._lu = sla.lu_factor(m, check_finite=False)
        gecon = sla.get_lapack_funcs("gecon", (self._lu[0],))
        rcond, info = gecon(self._lu[0], anorm)
        if info != 0:  # pragma: no cover - LAPACK input error
            raise RuntimeError(f"gecon failed with info={info}")
        self.rcond = float(rcond)

    def solve(self, rhs: np.ndarray, trans: int = 0) -> np.ndarray:
        return sla.lu_solve(self._lu, rhs, trans=trans, check_finite=False)


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def is_symmetric(m: np.ndarray, rtol: float) -> bool:
    gap = np.max(np.abs(m - m.T)) if m.size else 0.0
    return gap <= rtol * (1.0 + np.max(np.abs(m), initial=0.0))


def cholesky_ok(m: np.ndarray) -> bool:
    """Whether the symmetrized matrix admits a Cholesky factorization."""
    try:
        np.linalg.cholesky(symmetrize(np.asarray(m, dtype=float)))
    except np.linalg.LinAlgError:
        return False
    return True


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Sorted copy: ascending by real part, ties broken by imaginary part."""
    values = np.asarray(values)
    idx = np.lexsort((values.imag, values.real))
    return values[idx]


def min_pairwise_gap(values: np.ndarray) -> float:
    """Smallest |v_i - v_j| over distinct index pairs (inf for length < 2)."""
    values = np.asarray(values, dtype=complex)
    if values.size < 2:
        return np.inf
    diff = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())
