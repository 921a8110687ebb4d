"""H2 norms and reduction errors via two independent routes.

The gramian route solves a Lyapunov equation for the block error realization.
The pole-residue route expands the squared error over the poles of both
systems, evaluating transfer functions at the mirror images of the poles:

    J = sum_i phi_i [H(-lam_i) - H_r(-lam_i)]
      + sum_j phit_j [H_r(-lamt_j) - H(-lamt_j)]

which equals ||H - H_r||_{H2}^2 for stable systems with simple poles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ._linalg import is_symmetric, symmetrize
from .errors import PoleCollision, ResidualTooLarge, UnstableMatrix
from .systems import (
    SYMMETRY_RTOL,
    StateSpaceSystem,
    eval_transfer,
    to_pole_residue,
)

#: Relative residual accepted from a Lyapunov solve.
LYAP_RESIDUAL_RTOL = 1e-10
#: Relative pole distance below which the pole-residue route is skipped.
POLE_COLLISION_RTOL = 1e-8
#: ||H|| below this is treated as zero when forming relative errors.
H2_TINY = 1e-14


def lyapunov_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a P + P a^T + rhs = 0 for symmetric rhs and Hurwitz a.

    Symmetric `a` is handled by orthogonal eigendecomposition; otherwise a
    Schur-based direct solve is used.  The result is checked against the
    defining equation.

    Raises
    ------
    UnstableMatrix
        If the spectrum of `a` is not contained in the open left half-plane.
    ResidualTooLarge
        If the post-solve residual check fails.
    """
    a = np.asarray(a, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or rhs.shape != a.shape:
        raise ValueError("a and rhs must be square matrices of equal shape")
    rhs_scale = 1.0 + np.max(np.abs(rhs), initial=0.0)
    if np.max(np.abs(rhs - rhs.T), initial=0.0) > 1e-10 * rhs_scale:
        raise ValueError("rhs must be symmetric")
    if is_symmetric(a, SYMMETRY_RTOL):
        lam, q = np.linalg.eigh(symmetrize(a))
        if lam.max() >= 0:
            raise UnstableMatrix(f"matrix has an eigenvalue at {lam.max():g} >= 0")
        rt = q.T @ rhs @ q
        p = q @ (-rt / (lam[:, None] + lam[None, :])) @ q.T
    else:
        if np.max(np.linalg.eigvals(a).real) >= 0:
            raise UnstableMatrix("matrix spectrum is not in the open left half-plane")
        p = sla.solve_continuous_lyapunov(a, -rhs)
    p = symmetrize(p)
    resid = np.max(np.abs(a @ p + p @ a.T + rhs))
    if resid > LYAP_RESIDUAL_RTOL * rhs_scale:
        raise ResidualTooLarge(
            f"Lyapunov residual {resid:.2e} exceeds {LYAP_RESIDUAL_RTOL:g} * (1 + |rhs|)"
        )
    return p


def controllability_gramian(sys: StateSpaceSystem) -> np.ndarray:
    return lyapunov_solve(sys.a, np.outer(sys.b, sys.b))


def h2_norm(sys: StateSpaceSystem) -> float:
    """H2 norm sqrt(c^T P c) with P the controllability gramian."""
    p = controllability_gramian(sys)
    return float(np.sqrt(max(float(sys.c @ p @ sys.c), 0.0)))


def error_system(full: StateSpaceSystem, red: StateSpaceSystem) -> StateSpaceSystem:
    """Block realization of H - H_r (block-diagonal A, stacked b, [c; -c_r])."""
    return StateSpaceSystem(
        sla.block_diag(full.a, red.a),
        np.concatenate([full.b, red.b]),
        np.concatenate([full.c, -red.c]),
    )


@dataclass(frozen=True)
class H2ErrorReport:
    """H2 error of a reduced model computed by both routes.

    `cost_j` is the squared-error expansion over poles; it is None when a
    pole collision forced the pole-residue route to be skipped.
    """

    error_norm_gramian: float
    error_norm_pole_residue: float | None
    relative_h2_error: float
    cost_j: float | None
    route_discrepancy: float | None
    pole_collision: bool
    h2_norm_full: float

    def to_dict(self) -> dict:
        return {
            "error_norm_gramian": self.error_norm_gramian,
            "error_norm_pole_residue": self.error_norm_pole_residue,
            "relative_h2_error": self.relative_h2_error,
            "cost_J": self.cost_j,
            "route_discrepancy": self.route_discrepancy,
            "pole_collision": self.pole_collision,
            "h2_norm_full": self.h2_norm_full,
        }


def _pole_residue_cost(full: StateSpaceSystem, red: StateSpaceSystem) -> float:
    """Squared H2 error expanded over the poles of both systems.

    Raises PoleCollision when a pole of the full model coincides with a pole
    of the reduced model within tolerance.
    """
    prf = to_pole_residue(full)
    prr = to_pole_residue(red)
    gap = np.abs(prf.poles[:, None] - prr.poles[None, :])
    limit = POLE_COLLISION_RTOL * (1.0 + np.abs(prf.poles[:, None]))
    if np.any(gap < limit):
        i, j = np.unravel_index(np.argmin(gap - limit), gap.shape)
        raise PoleCollision(
            f"full pole {prf.poles[i]:g} collides with reduced pole {prr.poles[j]:g}"
        )
    total = 0.0 + 0.0j
    for lam, phi in zip(prf.poles, prf.residues):
        m = -lam
        total += phi * (eval_transfer(full, m) - eval_transfer(red, m))
    for lam, phi in zip(prr.poles, prr.residues):
        m = -lam
        total += phi * (eval_transfer(red, m) - eval_transfer(full, m))
    return float(total.real)


def h2_error(full: StateSpaceSystem, red: StateSpaceSystem) -> H2ErrorReport:
    """H2 error by the gramian route and the pole-residue route.

    Both systems must be stable with distinct poles.  When a full pole
    coincides with a reduced pole the pole-residue route is skipped and the
    report is flagged; the gramian route is always evaluated.
    """
    gram = h2_norm(error_system(full, red))
    hnorm = h2_norm(full)
    try:
        cost = _pole_residue_cost(full, red)
    except PoleCollision:
        cost = None
        prnorm = None
        discrepancy = None
        collision = True
    else:
        prnorm = float(np.sqrt(max(cost, 0.0)))
        discrepancy = abs(gram - prnorm) / (gram + 1e-300)
        collision = False
    relative = gram if hnorm < H2_TINY else gram / hnorm
    return H2ErrorReport(
        error_norm_gramian=gram,
        error_norm_pole_residue=prnorm,
        relative_h2_error=relative,
        cost_j=cost,
        route_discrepancy=discrepancy,
        pole_collision=collision,
        h2_norm_full=hnorm,
    )
