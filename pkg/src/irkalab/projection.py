"""Interpolatory projection bases and projected reduced-order models.

Columns of V solve (s_j I - A) x = b and columns of W solve the transposed
systems, so the oblique projection of (A, b, c) onto range(V) along range(W)
matches H and H' at every interpolation point.  Conjugate shift pairs are
realified (real/imaginary part columns) to keep reduced models real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from ._linalg import SHIFT_RCOND_FLOOR, ShiftedSolver, canonical_order, min_pairwise_gap, symmetrize
from .errors import RankDeficientBasis, SingularGramian, SingularShift
from .systems import DEFLATION_RTOL, StateSpaceSystem, eval_transfer

#: Relative rank tolerance for projection bases (scaled by largest column norm).
RANK_RTOL = 1e-10
#: Reciprocal condition estimate of W^T V below which reduction is refused.
GRAMIAN_RCOND_FLOOR = 1e-13

MODE_PETROV_GALERKIN = "petrov_galerkin"
MODE_SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class ShiftSet:
    """Ordered interpolation points, closed under conjugation and distinct."""

    shifts: np.ndarray

    def __post_init__(self):
        s = np.array(self.shifts, dtype=complex).reshape(-1)
        if s.size == 0:
            raise ValueError("a shift set must contain at least one point")
        if not np.all(np.isfinite(s)):
            raise ValueError("shifts must be finite")
        scale = 1.0 + float(np.max(np.abs(s)))
        if min_pairwise_gap(s) <= DEFLATION_RTOL * scale:
            raise ValueError("shifts must be pairwise distinct beyond the deflation tolerance")
        if not np.allclose(
            canonical_order(s), canonical_order(s.conj()), rtol=0, atol=1e-10 * scale
        ):
            raise ValueError("shifts must be closed under complex conjugation")
        s.setflags(write=False)
        object.__setattr__(self, "shifts", s)

    def __len__(self) -> int:
        return self.shifts.size

    def __iter__(self):
        return iter(self.shifts)

    @property
    def r(self) -> int:
        return self.shifts.size

    def is_real_positive(self) -> bool:
        return bool(np.all(self.shifts.imag == 0) and np.all(self.shifts.real > 0))

    def sorted_values(self) -> np.ndarray:
        return canonical_order(self.shifts)


def _equilibrate_columns(m: np.ndarray) -> np.ndarray:
    """Scale columns to unit norm; resolvent columns vary over many decades
    while only their directions matter for the projection."""
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0.0):
        raise RankDeficientBasis("basis contains a zero column")
    return m / norms


def _orthonormal_range(m: np.ndarray, label: str) -> np.ndarray:
    """Orthonormal basis of range(m) via column-pivoted QR with a rank check."""
    q, rr, _ = sla.qr(_equilibrate_columns(m), mode="economic", pivoting=True)
    diag = np.abs(np.diag(rr))
    tol = RANK_RTOL * (diag[0] if diag.size else 0.0)
    rank = int(np.count_nonzero(diag > tol))
    if rank < m.shape[1]:
        raise RankDeficientBasis(
            f"{label} has numerical rank {rank} < {m.shape[1]} columns"
        )
    return q


@dataclass(frozen=True)
class ProjectionBasis:
    """Raw interpolation bases V, W plus an orthonormal basis Q for range(V)."""

    v: np.ndarray
    w: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        w = np.array(self.w, dtype=float)
        q = np.array(self.q, dtype=float)
        if v.ndim != 2 or v.shape != w.shape or q.shape != v.shape:
            raise ValueError("v, w, q must share the same n-by-r shape")
        for m, label in ((v, "V"), (w, "W")):
            sv = np.linalg.svd(_equilibrate_columns(m), compute_uv=False)
            if sv[-1] <= RANK_RTOL * sv[0]:
                raise RankDeficientBasis(
                    f"{label} has smallest singular value {sv[-1]:.2e} below rank tolerance"
                )
        if np.max(np.abs(q.T @ q - np.eye(q.shape[1]))) > 1e-12:
            raise ValueError("q must have orthonormal columns")
        for m in (v, w, q):
            m.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "q", q)

    @property
    def r(self) -> int:
        return self.v.shape[1]


def build_bases(sys: StateSpaceSystem, shifts: ShiftSet) -> ProjectionBasis:
    """Solve the shifted systems for all interpolation points.

    Column j of V solves (s_j I - A) x = b and column j of W solves
    (s_j I - A)^T y = c, one LU factorization per shift (the transpose solve
    reuses it).  For a conjugate shift pair the two complex columns are
    replaced by real and imaginary parts, placed at the pair's positions.
    When A is exactly symmetric with b = c the W columns equal the V columns
    and are not recomputed.

    Raises
    ------
    SingularShift
        If some s_j I - A is numerically singular.
    RankDeficientBasis
        If the assembled basis has numerical rank below r.
    """
    a, b, c = sys.a, sys.b, sys.c
    n, r = sys.n, len(shifts)
    eye = np.eye(n)
    exact_sss = bool(np.array_equal(a, a.T) and np.array_equal(b, c))
    v = np.empty((n, r))
    w = np.empty((n, r))
    svals = shifts.shifts
    done = np.zeros(r, dtype=bool)
    for j in range(r):
        if done[j]:
            continue
        s = svals[j]
        if s.imag == 0.0:
            solver = ShiftedSolver(s.real * eye - a)
            if solver.rcond < SHIFT_RCOND_FLOOR:
                raise SingularShift(f"shift {s.real:g} is numerically an eigenvalue of A")
            v[:, j] = solver.solve(b)
            w[:, j] = v[:, j] if exact_sss else solver.solve(c, trans=1)
            done[j] = True
            continue
        dist = np.abs(svals - s.conj()) + np.where(done, np.inf, 0.0)
        dist[j] = np.inf
        k = int(np.argmin(dist))
        if not dist[k] <= 1e-10 * (1.0 + abs(s)):
            raise ValueError(f"shift {s} has no conjugate partner")
        solver = ShiftedSolver(s * eye.astype(complex) - a)
        if solver.rcond < SHIFT_RCOND_FLOOR:
            raise SingularShift(f"shift {s} is numerically an eigenvalue of A")
        xv = solver.solve(b.astype(complex))
        xw = xv if exact_sss else solver.solve(c.astype(complex), trans=1)
        v[:, j], v[:, k] = xv.real, xv.imag
        w[:, j], w[:, k] = xw.real, xw.imag
        done[j] = done[k] = True
    q = _orthonormal_range(v, "V")
    _orthonormal_range(w, "W")
    return ProjectionBasis(v=v, w=w, q=q)


def reduce(sys: StateSpaceSystem, basis: ProjectionBasis, mode: str = MODE_PETROV_GALERKIN) -> StateSpaceSystem:
    """Project the system onto the basis.

    ``petrov_galerkin`` uses the oblique projection
    A_r = (W^T V)^{-1} W^T A V (computed on orthonormalized bases for the
    same ranges, which leaves the transfer function unchanged).
    ``symmetric`` uses the one-sided A_r = Q^T A Q with b_r = c_r = Q^T b,
    which keeps a state-space-symmetric input SSS by construction.

    Raises
    ------
    SingularGramian
        If W^T V is numerically singular in Petrov-Galerkin mode.
    """
    if mode == MODE_SYMMETRIC:
        q = basis.q
        ar = symmetrize(q.T @ sys.a @ q)
        br = q.T @ sys.b
        return StateSpaceSystem(ar, br, br.copy())
    if mode != MODE_PETROV_GALERKIN:
        raise ValueError(f"unknown reduction mode {mode!r}")
    qv = basis.q
    qw, _ = np.linalg.qr(_equilibrate_columns(basis.w))
    g = qw.T @ qv
    sv = np.linalg.svd(g, compute_uv=False)
    rcond = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if rcond < GRAMIAN_RCOND_FLOOR:
        raise SingularGramian(
            f"W^T V has reciprocal condition {rcond:.2e} below {GRAMIAN_RCOND_FLOOR:g}"
        )
    ar = np.linalg.solve(g, qw.T @ sys.a @ qv)
    br = np.linalg.solve(g, qw.T @ sys.b)
    cr = qv.T @ sys.c
    return StateSpaceSystem(ar, br, cr)


class HermiteResidual(NamedTuple):
    shift: complex
    value_residual: float
    derivative_residual: float


def check_hermite(sys: StateSpaceSystem, red: StateSpaceSystem, shifts: ShiftSet) -> list[HermiteResidual]:
    """Relative value/derivative interpolation residuals at each shift."""
    out = []
    for s in shifts:
        h0 = eval_transfer(sys, s, 0)
        h1 = eval_transfer(sys, s, 1)
        g0 = eval_transfer(red, s, 0)
        g1 = eval_transfer(red, s, 1)
        out.append(
            HermiteResidual(
                shift=complex(s),
                value_residual=abs(h0 - g0) / (1.0 + abs(h0)),
                derivative_residual=abs(h1 - g1) / (1.0 + abs(h1)),
            )
        )
    return out
