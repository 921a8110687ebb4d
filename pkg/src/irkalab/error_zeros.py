"""Zero structure and positivity diagnostics of the error system H - H_r.

Finite transmission zeros of the error realization are computed as the
finite generalized eigenvalues of the pencil

    [[A_e, b_e], [c_e^T, 0]] - z * diag(I, 0).

For a symmetric compression of a stable SSS system the error is nonnegative
on the closed right half axis, and at a converged fixed point the 2r zeros
matching the mirrored reduced poles appear as double roots in the right half
plane while the remaining n - r - 1 zeros are real negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ._linalg import canonical_order
from .errors import DegenerateError
from .h2 import error_system
from .systems import StateSpaceSystem, eval_transfer

#: |Re z| below this (relative) counts as boundary; boundary zeros are
#: reported in the right-half-plane bucket and flagged.
BOUNDARY_RTOL = 1e-9
#: Relative radius for matching zeros against mirrored reduced poles.
CLUSTER_RTOL = 1e-6
#: Relative transfer-function deviation below which the error is degenerate.
DEGENERATE_RTOL = 1e-13

GRID_LO = 1e-4
GRID_HI = 1e4
GRID_COUNT = 2000


@dataclass(frozen=True)
class ErrorZeroReport:
    """Finite zeros of H - H_r with half-plane counts and a grid scan."""

    zeros: np.ndarray
    rhp_count: int
    lhp_count: int
    boundary_count: int
    interpolation_matched: int
    min_error_on_grid: float
    grid_argmin: float

    def to_dict(self) -> dict:
        return {
            "zeros": self.zeros,
            "rhp_count": self.rhp_count,
            "lhp_count": self.lhp_count,
            "boundary_count": self.boundary_count,
            "interpolation_matched": self.interpolation_matched,
            "min_error_on_grid": self.min_error_on_grid,
            "grid_argmin": self.grid_argmin,
        }


def transmission_zeros(sys: StateSpaceSystem) -> np.ndarray:
    """Finite transmission zeros of a SISO realization, canonically ordered.

    Computed as the finite generalized eigenvalues of the bordered pencil;
    the border rows are rescaled to the norm of A (zeros are invariant under
    scaling of b and c), which improves the conditioning of the QZ sweep.
    """
    n = sys.n
    m = np.zeros((n + 1, n + 1))
    m[:n, :n] = sys.a
    scale = max(np.linalg.norm(sys.a, 1), 1.0)
    bnorm = np.linalg.norm(sys.b)
    cnorm = np.linalg.norm(sys.c)
    if bnorm == 0.0 or cnorm == 0.0:
        raise ValueError("transmission zeros require nonzero b and c")
    m[:n, n] = sys.b * (scale / bnorm)
    m[n, :n] = sys.c * (scale / cnorm)
    nn = np.eye(n + 1)
    nn[n, n] = 0.0
    alpha, beta = sla.eig(m, nn, right=False, homogeneous_eigvals=True)
    finite = np.abs(beta) > 1e-8 * (np.abs(alpha) + np.abs(beta))
    return canonical_order(alpha[finite] / beta[finite])


def _polish_double_zero(full, red, start: float) -> float:
    """Newton refinement of a double zero of e = H - H_r on the positive axis.

    A double zero is a simple root of e', so iterate on e' with derivative
    e''.  The start point (the midpoint of a symmetrically split pair) is
    already second-order accurate; the best iterate by |e'| is returned, and
    iterates leaving the start's neighbourhood are discarded.
    """
    def d1(s: float) -> float:
        return (eval_transfer(full, s, 1) - eval_transfer(red, s, 1)).real

    def d2(s: float) -> float:
        return (eval_transfer(full, s, 2) - eval_transfer(red, s, 2)).real

    best = s = float(start)
    best_slope = abs(d1(s))
    for _ in range(12):
        h = d2(s)
        if h == 0.0:
            break
        step = d1(s) / h
        s_new = s - step
        if s_new <= 0.0 or abs(s_new - start) > 1e-4 * (1.0 + abs(start)):
            break
        s = s_new
        slope = abs(d1(s))
        if slope < best_slope:
            best, best_slope = s, slope
        if abs(step) <= 1e-15 * (1.0 + abs(s)):
            break
    return best


def evaluation_grid() -> np.ndarray:
    """s = 0 plus GRID_COUNT log-spaced points on [GRID_LO, GRID_HI]."""
    return np.concatenate(
        [[0.0], np.logspace(np.log10(GRID_LO), np.log10(GRID_HI), GRID_COUNT)]
    )


def error_zeros(full: StateSpaceSystem, red: StateSpaceSystem) -> ErrorZeroReport:
    """Zero structure and grid positivity scan of the error system.

    Raises
    ------
    DegenerateError
        If H - H_r is numerically zero at every probe point (exact
        reproduction, e.g. r = n), in which case the zero structure is
        undefined.
    """
    probes = np.logspace(-2, 2, 9)
    rel = 0.0
    for s in probes:
        h = eval_transfer(full, s)
        g = eval_transfer(red, s)
        rel = max(rel, abs(h - g) / (1.0 + abs(h)))
    if rel < DEGENERATE_RTOL:
        raise DegenerateError(
            f"error transfer function is numerically zero (max relative deviation {rel:.2e})"
        )

    err = error_system(full, red)
    zeros = transmission_zeros(err)
    mirrored = canonical_order(-red.poles())

    # QZ splits a defective double root by ~sqrt(eps * cond); where a split
    # pair straddles a mirrored pole, refine it on the error function itself.
    zeros = zeros.copy()
    for m in mirrored:
        if m.imag != 0.0 or m.real <= 0.0:
            continue
        near = np.nonzero(np.abs(zeros - m) <= 1e-4 * (1.0 + abs(m)))[0]
        if near.size != 2:
            continue
        mid = float(np.mean(zeros[near]).real)
        zeros[near] = _polish_double_zero(full, red, mid)
    zeros = canonical_order(zeros)

    scale = 1.0 + np.abs(zeros)
    boundary = np.abs(zeros.real) < BOUNDARY_RTOL * scale
    rhp = boundary | (zeros.real > 0)
    rhp_count = int(np.count_nonzero(rhp))
    lhp_count = int(zeros.size - rhp_count)

    matched = 0
    for m in mirrored:
        matched += int(np.count_nonzero(np.abs(zeros - m) <= CLUSTER_RTOL * (1.0 + abs(m))))

    grid = evaluation_grid()
    vals = np.empty(grid.size)
    for i, s in enumerate(grid):
        vals[i] = (eval_transfer(full, s) - eval_transfer(red, s)).real
    imin = int(np.argmin(vals))
    return ErrorZeroReport(
        zeros=zeros,
        rhp_count=rhp_count,
        lhp_count=lhp_count,
        boundary_count=int(np.count_nonzero(boundary)),
        interpolation_matched=matched,
        min_error_on_grid=float(vals[imin]),
        grid_argmin=float(grid[imin]),
    )
