"""Certification of converged shift sets for state-space-symmetric systems.

At a fixed point of the shift map the local behaviour of the iteration and
the local-minimum structure of the squared H2 error are both governed by a
small family of r-by-r matrices built from the reduced poles lamt_j and
residues phit_j:

    [S11]_ij = -(lamt_i + lamt_j)^{-1}
    [S12]_ij = -(lamt_i + lamt_j)^{-2}
    [S22]_ij = -2 (lamt_i + lamt_j)^{-3}
    R = diag(phit),  E = diag(H''(-lamt_i) - H_r''(-lamt_i))

with Schur complement S_c = S22 - S12 S11^{-1} S12 and K = E R^{-1}.  The
Jacobian of the shift map at the fixed point is R^{-1} S_c^{-1} E, whose
eigenvalues coincide with those of the symmetric definite pencil
K x = mu S_c x; the fixed point is attractive iff all |mu| < 1, and it is a
local minimum iff -Phi = S_c - K is positive definite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg as sla

from ._linalg import canonical_order, cholesky_ok, min_pairwise_gap, symmetrize
from .errors import FdMismatchWarning, NonZipReduced, NotAFixedPoint, UnstableSystem
from .irka import IterationTrace, optimality_residuals, shift_map
from .projection import ShiftSet
from .systems import (
    DEFLATION_RTOL,
    StateSpaceSystem,
    eval_transfer,
    is_state_space_symmetric,
    to_pole_residue,
)

#: Maximum first-order optimality residual accepted for a "fixed point".
FIXED_POINT_RTOL = 1e-6
#: Half-width of the indeterminate band around spectral radius 1.
ATTRACTIVITY_MARGIN = 1e-8
#: Analytic-vs-finite-difference Jacobian disagreement that triggers a warning.
FD_WARN_THRESHOLD = 1e-4

VERDICT_ATTRACTIVE = "ATTRACTIVE_LOCAL_MIN"
VERDICT_REPELLENT = "REPELLENT_OR_SADDLE"
VERDICT_INDETERMINATE = "INDETERMINATE"


def s_block_matrices(lambdas: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three pole-pair matrices S11, S12, S22 for real negative poles."""
    lam = np.asarray(lambdas, dtype=float)
    sums = lam[:, None] + lam[None, :]
    return -1.0 / sums, -1.0 / sums**2, -2.0 / sums**3


def s_tilde_matrix(lambdas: np.ndarray) -> np.ndarray:
    """The 2r-by-2r block matrix [[S11, S12], [S12, S22]]."""
    s11, s12, s22 = s_block_matrices(lambdas)
    return np.block([[s11, s12], [s12, s22]])


@dataclass(frozen=True)
class AnalysisMatrices:
    """Matrices of the fixed-point analysis, ordered so that the mirrored
    poles -lambdas are ascending (matching canonical shift order)."""

    lambdas: np.ndarray
    residues: np.ndarray
    s11: np.ndarray
    s12: np.ndarray
    s22: np.ndarray
    r_mat: np.ndarray
    e_mat: np.ndarray
    k_mat: np.ndarray
    s_c: np.ndarray
    m_mat: np.ndarray
    phi: np.ndarray

    @property
    def r(self) -> int:
        return self.lambdas.size

    def to_dict(self) -> dict:
        return {
            "lambdas": self.lambdas,
            "residues": self.residues,
            "s11": self.s11,
            "s12": self.s12,
            "s22": self.s22,
            "r_mat": self.r_mat,
            "e_mat": self.e_mat,
            "k_mat": self.k_mat,
            "s_c": self.s_c,
            "m_mat": self.m_mat,
            "phi": self.phi,
        }


def _zip_pole_residue(red: StateSpaceSystem) -> tuple[np.ndarray, np.ndarray]:
    """Real negative distinct poles and positive residues of the reduced model,
    ordered so the mirrored poles are ascending."""
    try:
        pr = to_pole_residue(red)
    except Exception as exc:
        raise NonZipReduced(f"reduced model has no simple pole-residue form: {exc}") from exc
    poles, residues = pr.poles, pr.residues
    if np.any(np.abs(poles.imag) > DEFLATION_RTOL * (1.0 + np.abs(poles.real))):
        raise NonZipReduced("reduced model has non-real poles")
    if np.any(np.abs(residues.imag) > DEFLATION_RTOL * (1.0 + np.abs(residues))):
        raise NonZipReduced("reduced model has non-real residues")
    lam, phi = poles.real, residues.real
    if np.any(lam >= 0):
        raise NonZipReduced("reduced model has a pole with Re >= 0")
    if np.any(phi <= 0):
        raise NonZipReduced("reduced model has a nonpositive residue")
    if min_pairwise_gap(lam) <= DEFLATION_RTOL * (1.0 + np.max(np.abs(lam))):
        raise NonZipReduced("reduced poles are not distinct")
    order = np.argsort(-lam)
    return lam[order], phi[order]


def assemble(full: StateSpaceSystem, red: StateSpaceSystem) -> AnalysisMatrices:
    """Build the analysis matrices for a converged reduced model.

    `full` must be stable and state-space-symmetric; `red` must satisfy the
    first-order optimality residuals (within FIXED_POINT_RTOL) and have real
    negative distinct poles with positive residues.

    Raises
    ------
    NotAFixedPoint
        If the optimality residuals of `red` exceed the tolerance.
    NonZipReduced
        If `red` lacks the required pole-residue structure.
    """
    if not is_state_space_symmetric(full):
        raise ValueError("certification requires a state-space-symmetric full model")
    if full.spectral_abscissa() >= 0:
        raise UnstableSystem("certification requires a stable full model")
    lam, phi = _zip_pole_residue(red)
    vres, dres = optimality_residuals(full, red)
    worst = max(vres.max(), dres.max())
    if worst > FIXED_POINT_RTOL:
        raise NotAFixedPoint(
            f"optimality residual {worst:.2e} exceeds {FIXED_POINT_RTOL:g}"
        )
    s11, s12, s22 = s_block_matrices(lam)
    r_mat = np.diag(phi)
    gaps = np.empty(lam.size)
    for i, m in enumerate(-lam):
        gaps[i] = (eval_transfer(full, m, 2) - eval_transfer(red, m, 2)).real
    e_mat = np.diag(gaps)
    k_mat = e_mat @ np.diag(1.0 / phi)
    s_c = s22 - s12 @ np.linalg.solve(s11, s12)
    m_mat = np.block([[s11, s12], [s12, s22 - k_mat]])
    phi_pencil = k_mat - s_c
    return AnalysisMatrices(
        lambdas=lam,
        residues=phi,
        s11=s11,
        s12=s12,
        s22=s22,
        r_mat=r_mat,
        e_mat=e_mat,
        k_mat=k_mat,
        s_c=s_c,
        m_mat=m_mat,
        phi=phi_pencil,
    )


@dataclass(frozen=True)
class FixedPointCertificate:
    """Attractivity and local-minimum certificate for a converged shift set.

    `jacobian` is the analytic Jacobian of the shift map at the fixed point,
    R^{-1} S_c^{-1} E; `jacobian_eigs` are the eigenvalues of the equivalent
    pencil K x = mu S_c x (real whenever S_c is definite), and
    `spectral_radius` is max |mu|.
    """

    matrices: AnalysisMatrices
    jacobian: np.ndarray
    spectral_radius: float
    jacobian_eigs: np.ndarray
    e_positive: bool
    s_tilde_positive: bool
    neg_phi_positive: bool
    fd_jacobian_maxdiff: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "matrices": self.matrices.to_dict(),
            "jacobian": self.jacobian,
            "spectral_radius": self.spectral_radius,
            "jacobian_eigs": self.jacobian_eigs,
            "e_positive": self.e_positive,
            "s_tilde_positive": self.s_tilde_positive,
            "neg_phi_positive": self.neg_phi_positive,
            "fd_jacobian_maxdiff": self.fd_jacobian_maxdiff,
            "verdict": self.verdict,
        }


def shift_map_jacobian_fd(
    sys: StateSpaceSystem, fixed_shifts: np.ndarray, rel_step: float = 1e-6
) -> np.ndarray:
    """Central finite-difference Jacobian of the shift map at a fixed point.

    Column k perturbs shift k by +-rel_step * |s_k|.  Output ordering is the
    canonical (ascending) order, so pole crossings under perturbation would
    invalidate the result; crossings do not occur for separated shifts and
    small steps.
    """
    s0 = np.asarray(fixed_shifts, dtype=float)
    r = s0.size
    jac = np.empty((r, r))
    for k in range(r):
        h = rel_step * abs(s0[k])
        plus = s0.copy()
        plus[k] += h
        minus = s0.copy()
        minus[k] -= h
        fp = shift_map(sys, ShiftSet(plus)).sorted_values().real
        fm = shift_map(sys, ShiftSet(minus)).sorted_values().real
        jac[:, k] = (fp - fm) / (2.0 * h)
    return jac


def certify(
    full: StateSpaceSystem,
    red: StateSpaceSystem,
    trace: IterationTrace | None = None,
    fd_step: float = 1e-6,
) -> FixedPointCertificate:
    """Certify attractivity and local-minimum structure at a fixed point.

    Positive definiteness is tested by attempted Cholesky factorization after
    symmetrization.  The analytic Jacobian is cross-checked against central
    finite differences of the shift map; a disagreement above
    FD_WARN_THRESHOLD raises an FdMismatchWarning (not an error).

    The verdict is ATTRACTIVE_LOCAL_MIN iff -Phi is positive definite and the
    spectral radius is below 1 - margin; spectral radii within the margin of
    1 yield INDETERMINATE.
    """
    if trace is not None and not trace.converged:
        raise NotAFixedPoint("iteration trace is not converged")
    mats = assemble(full, red)
    jac = np.linalg.solve(mats.s_c, mats.e_mat) / mats.residues[:, None]
    mu = sla.eigh(symmetrize(mats.k_mat), symmetrize(mats.s_c), eigvals_only=True)
    spectral_radius = float(np.max(np.abs(mu)))
    e_positive = bool(np.all(np.diag(mats.e_mat) > 0))
    s_tilde_positive = cholesky_ok(s_tilde_matrix(mats.lambdas))
    neg_phi_positive = cholesky_ok(-mats.phi)

    fd = shift_map_jacobian_fd(full, -mats.lambdas, rel_step=fd_step)
    fd_maxdiff = float(np.max(np.abs(fd - jac)))
    if fd_maxdiff > FD_WARN_THRESHOLD:
        warnings.warn(
            f"finite-difference Jacobian deviates by {fd_maxdiff:.2e}",
            FdMismatchWarning,
            stacklevel=2,
        )

    if abs(spectral_radius - 1.0) <= ATTRACTIVITY_MARGIN:
        verdict = VERDICT_INDETERMINATE
    elif neg_phi_positive and spectral_radius < 1.0 - ATTRACTIVITY_MARGIN:
        verdict = VERDICT_ATTRACTIVE
    else:
        verdict = VERDICT_REPELLENT
    return FixedPointCertificate(
        matrices=mats,
        jacobian=jac,
        spectral_radius=spectral_radius,
        jacobian_eigs=np.asarray(mu),
        e_positive=e_positive,
        s_tilde_positive=s_tilde_positive,
        neg_phi_positive=neg_phi_positive,
        fd_jacobian_maxdiff=fd_maxdiff,
        verdict=verdict,
    )


def verify_s_tilde_integral(lambdas, z) -> tuple[float, float]:
    """Quadratic form z^T S~ z versus its exponential-integral representation.

    For real negative lambdas and z in R^{2r},

        z^T S~ z = int_0^inf [ sum_i z_i e^{l_i t} - t sum_i z_{r+i} e^{l_i t} ]^2 dt.

    Returns the matrix-arithmetic value and the adaptive quadrature of the
    right-hand side on [0, T], with T chosen so the integrand tail is below
    1e-14.
    """
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    r = lam.size
    if z.size != 2 * r:
        raise ValueError(f"z must have length {2 * r}, got {z.size}")
    if np.any(lam >= 0):
        raise ValueError("lambdas must be strictly negative")
    st = s_tilde_matrix(lam)
    qform = float(z @ st @ z)
    z1, z2 = z[:r], z[r:]
    m1 = float(np.sum(np.abs(z1)))
    m2 = float(np.sum(np.abs(z2)))
    if m1 == 0.0 and m2 == 0.0:
        return qform, 0.0
    decay = 2.0 * float(lam.max())

    def integrand(t: float) -> float:
        e = np.exp(lam * t)
        val = z1 @ e - t * (z2 @ e)
        return val * val

    horizon = 1.0
    while (m1 + horizon * m2) ** 2 * np.exp(decay * horizon) > 1e-14:
        horizon *= 1.5
    quadrature, _ = scipy.integrate.quad(integrand, 0.0, horizon, limit=200)
    return qform, float(quadrature)
