"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

import irkalab as il
from irkalab.errors import RankDeficientBasis

#: Smallest acceptable normalized singular value for a well-posed basis.
MIN_BASIS_SV = 1e-8


def random_general_stable(rng: np.random.Generator, n: int) -> il.StateSpaceSystem:
    """Random non-symmetric stable system with spectral abscissa <= -0.5."""
    g = rng.standard_normal((n, n))
    a = g - (np.max(np.linalg.eigvals(g).real) + 0.5) * np.eye(n)
    return il.StateSpaceSystem(a, rng.standard_normal(n), rng.standard_normal(n))


def equilibrated_sv_ratio(m: np.ndarray) -> float:
    mn = m / np.linalg.norm(m, axis=0)
    sv = np.linalg.svd(mn, compute_uv=False)
    return float(sv[-1] / sv[0])


def draw_hermite_pair(rng: np.random.Generator, trial: int):
    """One seeded, well-posed (system, shifts, basis, mode) tuple.

    Alternates SSS and general systems; even trials are symmetric, odd trials
    get a conjugate shift pair when r >= 2.  Redraws (deterministically)
    until the assembled basis is comfortably full rank, so the pair probes
    interpolation accuracy rather than rank-deficiency handling.
    """
    for _ in range(50):
        n = int(rng.integers(6, 41))
        r = int(rng.integers(1, min(9, n)))
        sss = trial % 2 == 0
        if sss:
            sysm = il.random_sss(n, seed=int(rng.integers(0, 2**31)))
        else:
            sysm = random_general_stable(rng, n)
        mags = np.abs(sysm.poles().real)
        vals = np.sort(np.exp(rng.uniform(np.log(mags.min()), np.log(mags.max()), r)))
        if r >= 2 and np.min(np.diff(vals) / vals[:-1]) < 0.05:
            continue
        vals = vals.astype(complex)
        if not sss and r >= 2:
            vals[0] = vals[0] + 0.5j * abs(vals[1])
            vals[1] = vals[0].conjugate()
        try:
            shifts = il.ShiftSet(vals)
            basis = il.build_bases(sysm, shifts)
        except (ValueError, RankDeficientBasis):
            continue
        if min(equilibrated_sv_ratio(basis.v), equilibrated_sv_ratio(basis.w)) < MIN_BASIS_SV:
            continue
        mode = "symmetric" if sss else "petrov_galerkin"
        return sysm, shifts, basis, mode
    raise RuntimeError("no well-posed interpolation pair found")


def worst_hermite_residual(sysm, red, shifts) -> float:
    res = il.check_hermite(sysm, red, shifts)
    return max(max(h.value_residual, h.derivative_residual) for h in res)


def sample_points(rng: np.random.Generator, sysm, count: int = 20) -> np.ndarray:
    """Real probe points away from the poles of `sysm`."""
    mags = np.abs(sysm.poles().real)
    return np.exp(rng.uniform(np.log(mags.min()), np.log(mags.max()), count))


def transfer_close(sys_a, sys_b, points, rtol: float) -> bool:
    for s in points:
        ha = il.eval_transfer(sys_a, s)
        hb = il.eval_transfer(sys_b, s)
        if abs(ha - hb) > rtol * (1.0 + abs(ha)):
            return False
    return True
