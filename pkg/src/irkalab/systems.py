"""State-space containers, transfer-function evaluation, and system taxonomy.

A system is the dense SISO realization (A, b, c) of H(s) = c^T (sI - A)^{-1} b.
State-space-symmetric (SSS) means A = A^T and b = c; such systems, when stable
and minimal, have distinct real negative poles with positive residues (the
pole-residue shape of a zero-interlacing-pole transfer function).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ._linalg import (
    SHIFT_RCOND_FLOOR,
    ShiftedSolver,
    canonical_order,
    is_symmetric,
    min_pairwise_gap,
    symmetrize,
)
from .errors import RepeatedPoles, SingularShift, UnstableSystem

#: Relative max-norm tolerance for treating A as symmetric and b as equal to c.
SYMMETRY_RTOL = 1e-12
#: Relative eigenvalue separation below which poles count as repeated.
DEFLATION_RTOL = 1e-10
#: Residues at or below this fraction of the residue sum are dropped as
#: unobservable/uncontrollable modes.
MINIMALITY_RTOL = 1e-12

LABEL_SSS = "SSS"
LABEL_ZIP = "ZIP"
LABEL_GENERAL = "GENERAL"


def _check_vector(v, n: int, name: str) -> np.ndarray:
    v = np.array(v, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise ValueError(f'field "{name}": expected length {n}, got {v.size}')
    if not np.all(np.isfinite(v)):
        raise ValueError(f'field "{name}": entries must be finite')
    return v


@dataclass(frozen=True)
class StateSpaceSystem:
    """Dense realization (A, b, c) of a strictly proper SISO transfer function.

    Arrays are copied and frozen at construction; instances are safe to share
    across threads.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f'field "A": expected a square matrix, got shape {a.shape}')
        if not np.all(np.isfinite(a)):
            raise ValueError('field "A": entries must be finite')
        n = a.shape[0]
        b = _check_vector(self.b, n, "b")
        c = _check_vector(self.c, n, "c")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def poles(self) -> np.ndarray:
        """Eigenvalues of A in canonical order."""
        if is_symmetric(self.a, SYMMETRY_RTOL):
            return np.linalg.eigvalsh(symmetrize(self.a)).astype(complex)
        return canonical_order(np.linalg.eigvals(self.a))

    def spectral_abscissa(self) -> float:
        return float(np.max(self.poles().real))

    def is_stable(self) -> bool:
        return self.spectral_abscissa() < 0.0


@dataclass(frozen=True)
class PoleResidueForm:
    """Poles and residues of a strictly proper transfer function.

    Entries are stored in canonical order (ascending real part, then
    imaginary part).  Complex poles must occur in conjugate pairs with
    conjugate residues, so that the underlying impulse response is real.
    """

    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        poles = np.array(self.poles, dtype=complex).reshape(-1)
        residues = np.array(self.residues, dtype=complex).reshape(-1)
        if poles.size == 0:
            raise ValueError('field "poles": at least one pole is required')
        if poles.shape != residues.shape:
            raise ValueError(
                f'field "residues": expected length {poles.size}, got {residues.size}'
            )
        if not (np.all(np.isfinite(poles)) and np.all(np.isfinite(residues))):
            raise ValueError("poles and residues must be finite")
        scale = 1.0 + np.max(np.abs(poles))
        if min_pairwise_gap(poles) <= DEFLATION_RTOL * scale:
            raise RepeatedPoles(
                f"pole separation below deflation tolerance {DEFLATION_RTOL:g}"
            )
        idx = np.lexsort((poles.imag, poles.real))
        poles, residues = poles[idx], residues[idx]
        # conjugate closure of the (pole, residue) multiset
        key = np.lexsort((poles.conj().imag, poles.conj().real))
        if not (
            np.allclose(poles, poles.conj()[key], rtol=0, atol=1e-10 * scale)
            and np.allclose(
                residues,
                residues.conj()[key],
                rtol=0,
                atol=1e-10 * (1.0 + np.max(np.abs(residues))),
            )
        ):
            raise ValueError("poles/residues are not closed under conjugation")
        for arr in (poles, residues):
            arr.setflags(write=False)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)

    @property
    def order(self) -> int:
        return self.poles.size

    def is_real(self) -> bool:
        return bool(np.all(self.poles.imag == 0) and np.all(self.residues.imag == 0))

    def evaluate(self, s: complex, order: int = 0) -> complex:
        """Partial-fraction evaluation of the transfer function or a derivative."""
        d = s - self.poles
        if order == 0:
            return complex(np.sum(self.residues / d))
        if order == 1:
            return complex(-np.sum(self.residues / d**2))
        if order == 2:
            return complex(2.0 * np.sum(self.residues / d**3))
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")

    def to_system(self) -> StateSpaceSystem:
        """Real state-space realization.

        With real poles and nonnegative real residues the result is the
        symmetric diagonal form (b = c = sqrt(residues)); otherwise a real
        block-diagonal realization is returned, one 2x2 block per conjugate
        pair.
        """
        if self.is_real() and np.all(self.residues.real >= 0):
            amp = np.sqrt(self.residues.real)
            return StateSpaceSystem(np.diag(self.poles.real), amp, amp.copy())
        blocks, bs, cs = [], [], []
        seen = np.zeros(self.order, dtype=bool)
        for i, (lam, phi) in enumerate(zip(self.poles, self.residues)):
            if seen[i]:
                continue
            if lam.imag == 0:
                blocks.append(np.array([[lam.real]]))
                bs.append([1.0])
                cs.append([phi.real])
                seen[i] = True
                continue
            j = int(np.argmin(np.abs(self.poles - lam.conj()) + np.where(seen, np.inf, 0)))
            seen[i] = seen[j] = True
            al, be = lam.real, abs(lam.imag)
            u, v = phi.real, phi.imag if lam.imag > 0 else -phi.imag
            blocks.append(np.array([[al, be], [-be, al]]))
            bs.append([1.0, 0.0])
            cs.append([2.0 * u, 2.0 * v])
        return StateSpaceSystem(
            sla.block_diag(*blocks), np.concatenate(bs), np.concatenate(cs)
        )


def eval_transfer(sys: StateSpaceSystem, s: complex, order: int = 0) -> complex:
    """Evaluate H(s) or one of its first two derivatives.

    Parameters
    ----------
    sys
        System to evaluate.
    s
        Evaluation point; must not be an eigenvalue of A.
    order
        0 for H(s), 1 for H'(s) = -c^T (sI-A)^{-2} b, 2 for
        H''(s) = 2 c^T (sI-A)^{-3} b.

    All orders are computed from repeated solves against a single LU
    factorization of sI - A; the matrix is never inverted explicitly.

    Raises
    ------
    SingularShift
        If sI - A is numerically singular at `s`.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order}")
    s = complex(s)
    eye = np.eye(sys.n)
    m = s.real * eye - sys.a if s.imag == 0.0 else s * eye - sys.a
    solver = ShiftedSolver(m)
    if solver.rcond < SHIFT_RCOND_FLOOR:
        raise SingularShift(f"sI - A is numerically singular at s = {s} (rcond = {solver.rcond:.2e})")
    x = solver.solve(sys.b)
    if order == 0:
        return complex(sys.c @ x)
    x = solver.solve(x)
    if order == 1:
        return complex(-(sys.c @ x))
    x = solver.solve(x)
    return complex(2.0 * (sys.c @ x))


def transfer_values(sys: StateSpaceSystem, points, order: int = 0) -> np.ndarray:
    """Evaluate the transfer function on an iterable of points."""
    return np.array([eval_transfer(sys, s, order) for s in points])


def _require_separated(eigs: np.ndarray) -> None:
    scale = 1.0 + float(np.max(np.abs(eigs)))
    if min_pairwise_gap(eigs) <= DEFLATION_RTOL * scale:
        raise RepeatedPoles(
            f"eigenvalue separation below deflation tolerance {DEFLATION_RTOL:g}"
        )


def to_pole_residue(sys: StateSpaceSystem) -> PoleResidueForm:
    """Partial-fraction decomposition of the transfer function.

    For symmetric A an orthogonal eigendecomposition A = Q diag(lam) Q^T gives
    residue_i = (q_i^T b)(q_i^T c); with b = c this is a square, hence
    nonnegative.  Otherwise left/right eigenvectors are used:
    residue_i = (c^T v_i)(w_i^H b) / (w_i^H v_i).

    Raises
    ------
    RepeatedPoles
        If the eigenvalue separation falls below the deflation tolerance.
    """
    if is_symmetric(sys.a, SYMMETRY_RTOL):
        lam, q = np.linalg.eigh(symmetrize(sys.a))
        _require_separated(lam)
        res = (q.T @ sys.b) * (q.T @ sys.c)
        return PoleResidueForm(lam.astype(complex), res.astype(complex))
    lam, vl, vr = sla.eig(sys.a, left=True, right=True)
    _require_separated(lam)
    num = (sys.c @ vr) * (vl.conj().T @ sys.b)
    den = np.sum(vl.conj() * vr, axis=0)
    return PoleResidueForm(lam, num / den)


def is_state_space_symmetric(sys: StateSpaceSystem) -> bool:
    """A = A^T and b = c up to the relative symmetry tolerance."""
    bc_scale = 1.0 + max(np.max(np.abs(sys.b), initial=0.0), np.max(np.abs(sys.c), initial=0.0))
    return is_symmetric(sys.a, SYMMETRY_RTOL) and bool(
        np.max(np.abs(sys.b - sys.c), initial=0.0) <= SYMMETRY_RTOL * bc_scale
    )


def _merged_modes(lam: np.ndarray, phi: np.ndarray):
    """Cluster near-coincident eigenvalues (ascending) and sum their residues."""
    order = np.argsort(lam)
    lam, phi = lam[order], phi[order]
    groups = [[0]]
    for i in range(1, lam.size):
        if lam[i] - lam[groups[-1][-1]] <= DEFLATION_RTOL * max(1.0, abs(lam[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    mlam = np.empty(len(groups))
    mphi = np.empty(len(groups))
    for k, g in enumerate(groups):
        w = phi[g]
        total = w.sum()
        mlam[k] = np.average(lam[g], weights=np.abs(w)) if np.any(w != 0) else lam[g].mean()
        mphi[k] = total
    return mlam, mphi


def _zip_test(poles: np.ndarray, residues: np.ndarray) -> bool:
    """Real negative distinct poles with strictly positive residues."""
    pscale = 1.0 + np.abs(poles.real)
    rscale = 1.0 + np.abs(residues)
    if np.any(np.abs(poles.imag) > DEFLATION_RTOL * pscale):
        return False
    if np.any(np.abs(residues.imag) > DEFLATION_RTOL * rscale):
        return False
    lam, phi = poles.real, residues.real
    if np.any(lam >= 0) or np.any(phi <= 0):
        return False
    return min_pairwise_gap(lam) > DEFLATION_RTOL * (1.0 + np.max(np.abs(lam)))


@dataclass(frozen=True)
class Classification:
    """Result of `classify` with the diagnostics backing the label."""

    label: str
    is_sss: bool
    is_zip: bool
    asymmetry: float
    bc_gap: float
    pole_residue: PoleResidueForm | None
    detail: str


def classify(sys: StateSpaceSystem) -> Classification:
    """Classify a system as SSS, ZIP, or GENERAL.

    The SSS test is structural (A = A^T, b = c up to tolerance).  The ZIP
    test is on the transfer function: after discarding negligible modes and
    merging numerically repeated eigenvalues, all poles must be real,
    negative and distinct with positive residues.  Classification is total:
    systems whose pole-residue data cannot be computed are labelled GENERAL.
    """
    asym = float(np.max(np.abs(sys.a - sys.a.T), initial=0.0))
    bc_gap = float(np.max(np.abs(sys.b - sys.c), initial=0.0))
    sss = is_state_space_symmetric(sys)

    pr = None
    zip_ok = False
    detail = ""
    if is_symmetric(sys.a, SYMMETRY_RTOL):
        lam, q = np.linalg.eigh(symmetrize(sys.a))
        phi = (q.T @ sys.b) * (q.T @ sys.c)
        mlam, mphi = _merged_modes(lam, phi)
        keep = np.abs(mphi) > MINIMALITY_RTOL * np.sum(np.abs(mphi))
        if np.any(keep):
            zip_ok = _zip_test(mlam[keep].astype(complex), mphi[keep].astype(complex))
            try:
                pr = PoleResidueForm(mlam[keep].astype(complex), mphi[keep].astype(complex))
            except RepeatedPoles:
                pr = None
        else:
            detail = "zero transfer function"
    else:
        try:
            pr = to_pole_residue(sys)
        except RepeatedPoles:
            detail = "repeated poles; pole-residue test unavailable"
        else:
            total = np.sum(np.abs(pr.residues))
            keep = np.abs(pr.residues) > MINIMALITY_RTOL * total
            if np.any(keep):
                zip_ok = _zip_test(pr.poles[keep], pr.residues[keep])

    if sss:
        label = LABEL_SSS
    elif zip_ok:
        label = LABEL_ZIP
    else:
        label = LABEL_GENERAL
    return Classification(
        label=label,
        is_sss=sss,
        is_zip=zip_ok,
        asymmetry=asym,
        bc_gap=bc_gap,
        pole_residue=pr,
        detail=detail,
    )


def minimal_sss_realization(sys: StateSpaceSystem) -> StateSpaceSystem:
    """Minimal diagonal realization of a stable SSS system.

    Diagonalizes A orthogonally, merges numerically repeated eigenvalues by
    summing residues, drops modes whose residues fall below the minimality
    tolerance, and returns the diagonal realization with b = c = sqrt(residue).
    The result has distinct negative poles and positive residues.

    Raises
    ------
    UnstableSystem
        If any eigenvalue of A is >= 0.
    ValueError
        If the input is not SSS or the transfer function is identically zero.
    """
    if not is_state_space_symmetric(sys):
        raise ValueError("minimal_sss_realization requires a state-space-symmetric system")
    lam, q = np.linalg.eigh(symmetrize(sys.a))
    if lam.max() >= 0:
        raise UnstableSystem(f"system has an eigenvalue at {lam.max():g} >= 0")
    amp = q.T @ (0.5 * (sys.b + sys.c))
    mlam, mphi = _merged_modes(lam, amp**2)
    keep = mphi > MINIMALITY_RTOL * mphi.sum()
    if not np.any(keep):
        raise ValueError("transfer function is identically zero; no minimal realization")
    root = np.sqrt(mphi[keep])
    return StateSpaceSystem(np.diag(mlam[keep]), root, root.copy())
