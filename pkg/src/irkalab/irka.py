"""The shift -> reduce -> mirror fixed-point iteration.

One sweep interpolates at the current shifts, reduces, and mirrors the
reduced poles through the origin to obtain the next shifts.  The iteration
stops when the relative change of the (canonically sorted) shift set falls
below the tolerance.  For state-space-symmetric inputs the one-sided
symmetric projection is used, every intermediate model is again SSS, and all
shifts stay real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import canonical_order, symmetrize
from .errors import MirroredShiftInvalid, UnstableSystem
from .projection import (
    MODE_PETROV_GALERKIN,
    MODE_SYMMETRIC,
    ShiftSet,
    build_bases,
    reduce,
)
from .systems import StateSpaceSystem, eval_transfer, is_state_space_symmetric

INIT_LOGSPACE = "mirror_spectrum_logspace"
INIT_RANDOM = "random_loguniform"
INIT_STRATEGIES = (INIT_LOGSPACE, INIT_RANDOM)

#: Relative separation below which freshly mirrored shifts are nudged apart.
COINCIDENCE_RTOL = 1e-8


@dataclass(frozen=True)
class IrkaConfig:
    """Iteration parameters.

    `perturb_eps` is the relative nudge applied to numerically coincident
    mirrored poles so the next sweep sees distinct interpolation points.
    """

    r: int
    tol: float = 1e-10
    max_sweeps: int = 200
    init: str = INIT_LOGSPACE
    perturb_eps: float = 1e-8

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"reduction order must be >= 1, got {self.r}")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.init not in INIT_STRATEGIES:
            raise ValueError(f"unknown init strategy {self.init!r}")
        if not self.perturb_eps > 0:
            raise ValueError("perturb_eps must be positive")

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "tol": self.tol,
            "max_sweeps": self.max_sweeps,
            "init": self.init,
            "perturb_eps": self.perturb_eps,
        }


@dataclass
class SweepRecord:
    shifts_in: np.ndarray
    reduced_poles: np.ndarray
    shift_change: float


@dataclass
class IterationTrace:
    """Per-sweep history of one iteration run plus the final reduced model."""

    sweeps: list[SweepRecord]
    converged: bool
    final_model: StateSpaceSystem
    final_shifts: np.ndarray
    value_residuals: np.ndarray | None = None
    derivative_residuals: np.ndarray | None = None

    @property
    def n_sweeps(self) -> int:
        return len(self.sweeps)

    def fixed_point_residual(self) -> float:
        """max_i |s_i - (-lam_i)| / (1 + |s_i|) under canonical ordering."""
        mirrored = canonical_order(-self.final_model.poles())
        s = canonical_order(self.final_shifts)
        return float(np.max(np.abs(s - mirrored) / (1.0 + np.abs(s))))

    def to_dict(self) -> dict:
        from .fileio import system_to_dict

        opt = None
        if self.value_residuals is not None:
            opt = {
                "value_residuals": self.value_residuals,
                "derivative_residuals": self.derivative_residuals,
            }
        return {
            "trace_version": 1,
            "converged": self.converged,
            "n_sweeps": self.n_sweeps,
            "sweeps": [
                {
                    "shifts_in": rec.shifts_in,
                    "reduced_poles": rec.reduced_poles,
                    "shift_change": rec.shift_change,
                }
                for rec in self.sweeps
            ],
            "final_shifts": self.final_shifts,
            "final_model": system_to_dict(self.final_model),
            "optimality": opt,
        }


def _spectrum_range(sys: StateSpaceSystem) -> tuple[float, float]:
    mags = np.abs(sys.poles().real)
    lo, hi = float(mags.min()), float(mags.max())
    if hi <= lo * (1.0 + 1e-9):
        # single-magnitude spectrum: widen by half a decade each way
        lo, hi = lo / np.sqrt(10.0), hi * np.sqrt(10.0)
    return lo, hi


def initial_shifts(
    sys: StateSpaceSystem, r: int, strategy: str = INIT_LOGSPACE, seed: int = 0
) -> ShiftSet:
    """Initial real positive interpolation points.

    `mirror_spectrum_logspace` places r log-spaced points across the range of
    pole magnitudes (the geometric midpoint for r = 1); `random_loguniform`
    draws them log-uniformly from the same interval with the given seed.
    """
    if strategy not in INIT_STRATEGIES:
        raise ValueError(f"unknown init strategy {strategy!r}")
    if sys.spectral_abscissa() >= 0:
        raise UnstableSystem("initial shifts require a stable system")
    lo, hi = _spectrum_range(sys)
    if strategy == INIT_LOGSPACE:
        pts = np.array([np.sqrt(lo * hi)]) if r == 1 else np.geomspace(lo, hi, r)
        return ShiftSet(pts)
    rng = np.random.default_rng(seed)
    for _ in range(64):
        pts = np.sort(10.0 ** rng.uniform(np.log10(lo), np.log10(hi), r))
        if r < 2 or np.min(np.diff(pts)) > 1e-8 * (1.0 + pts.max()):
            return ShiftSet(pts)
    raise RuntimeError("failed to draw distinct random shifts")  # pragma: no cover


def _separate_coincident(values: np.ndarray, eps: float) -> np.ndarray:
    """Nudge near-coincident entries apart along the real axis.

    Symmetric real-part nudges preserve closure under conjugation.
    """
    out = canonical_order(values).copy()
    for _ in range(8):
        moved = False
        for k in range(1, out.size):
            if abs(out[k] - out[k - 1]) < COINCIDENCE_RTOL * (1.0 + abs(out[k - 1])):
                delta = eps * max(1.0, abs(out[k]))
                out[k - 1] -= delta
                out[k] += delta
                moved = True
        if not moved:
            break
        out = canonical_order(out)
    return out


def _sweep(
    sys: StateSpaceSystem, shifts: ShiftSet, perturb_eps: float
) -> tuple[ShiftSet, np.ndarray, StateSpaceSystem]:
    """One iteration step: returns (new shifts, reduced poles, reduced model)."""
    basis = build_bases(sys, shifts)
    sss = is_state_space_symmetric(sys)
    red = reduce(sys, basis, MODE_SYMMETRIC if sss else MODE_PETROV_GALERKIN)
    if sss:
        poles = np.linalg.eigvalsh(symmetrize(red.a)).astype(complex)
    else:
        poles = np.linalg.eigvals(red.a)
        if np.any(poles.real > 0):
            worst = poles[np.argmax(poles.real)]
            raise MirroredShiftInvalid(
                f"reduced model has unstable pole {worst}; its mirror image lies in the left half-plane"
            )
    mirrored = _separate_coincident(-poles, perturb_eps)
    return ShiftSet(mirrored), canonical_order(poles), red


def shift_map(sys: StateSpaceSystem, shifts: ShiftSet, perturb_eps: float = 1e-8) -> ShiftSet:
    """Mirrored reduced poles produced by one sweep, canonically sorted.

    The iteration has converged exactly when this map returns its argument.

    Raises
    ------
    MirroredShiftInvalid
        For non-symmetric systems whose reduced model is unstable (cannot
        occur on the SSS pathway, where Q^T A Q inherits negative
        definiteness).
    """
    new_shifts, _, _ = _sweep(sys, shifts, perturb_eps)
    return new_shifts


def optimality_residuals(
    full: StateSpaceSystem, red: StateSpaceSystem
) -> tuple[np.ndarray, np.ndarray]:
    """Relative interpolation residuals of H vs H_r at the mirrored poles of H_r.

    These vanish exactly at first-order-optimal reduced models (value and
    derivative matching at the reflected poles).
    """
    mirrored = canonical_order(-red.poles())
    vres = np.empty(mirrored.size)
    dres = np.empty(mirrored.size)
    for i, m in enumerate(mirrored):
        h0 = eval_transfer(full, m, 0)
        h1 = eval_transfer(full, m, 1)
        g0 = eval_transfer(red, m, 0)
        g1 = eval_transfer(red, m, 1)
        vres[i] = abs(h0 - g0) / (1.0 + abs(h0))
        dres[i] = abs(h1 - g1) / (1.0 + abs(h1))
    return vres, dres


def run_irka(sys: StateSpaceSystem, cfg: IrkaConfig, shifts0: ShiftSet) -> IterationTrace:
    """Iterate the shift map from `shifts0` until convergence or sweep limit.

    The convergence measure is the relative infinity-norm change of the
    canonically sorted shift vector.  The returned trace always carries the
    final reduced model (built from the last shift set); non-convergence is
    flagged rather than raised.  On convergence the first-order optimality
    residuals of the final model are evaluated and stored.
    """
    if not 1 <= cfg.r < sys.n:
        raise ValueError(f"reduction order r={cfg.r} must satisfy 1 <= r < n={sys.n}")
    if len(shifts0) != cfg.r:
        raise ValueError(f"expected {cfg.r} initial shifts, got {len(shifts0)}")
    if sys.spectral_abscissa() >= 0:
        raise UnstableSystem("iteration requires a stable system")

    sss = is_state_space_symmetric(sys)
    shifts = shifts0
    sweeps: list[SweepRecord] = []
    converged = False
    for _ in range(cfg.max_sweeps):
        new_shifts, red_poles, _ = _sweep(sys, shifts, cfg.perturb_eps)
        old_sorted = shifts.sorted_values()
        new_sorted = new_shifts.sorted_values()
        change = float(
            np.max(np.abs(new_sorted - old_sorted)) / np.max(np.abs(old_sorted))
        )
        sweeps.append(
            SweepRecord(
                shifts_in=shifts.shifts.copy(),
                reduced_poles=red_poles,
                shift_change=change,
            )
        )
        shifts = new_shifts
        if change <= cfg.tol:
            converged = True
            break

    basis = build_bases(sys, shifts)
    final_model = reduce(sys, basis, MODE_SYMMETRIC if sss else MODE_PETROV_GALERKIN)
    trace = IterationTrace(
        sweeps=sweeps,
        converged=converged,
        final_model=final_model,
        final_shifts=shifts.sorted_values(),
    )
    if converged:
        vres, dres = optimality_residuals(sys, final_model)
        trace.value_residuals = vres
        trace.derivative_residuals = dres
    return trace
