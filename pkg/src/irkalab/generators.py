"""Seeded generators for state-space-symmetric test systems."""

from __future__ import annotations

import numpy as np

from .systems import DEFLATION_RTOL, StateSpaceSystem
from ._linalg import min_pairwise_gap

KIND_RANDOM_SSS = "random_sss"
KIND_RC_LADDER = "rc_ladder"
KIND_DIAGONAL = "diagonal"
GENERATOR_KINDS = (KIND_RANDOM_SSS, KIND_RC_LADDER, KIND_DIAGONAL)

#: Stability margin enforced by random_sss: largest eigenvalue of A <= -this.
STABILITY_MARGIN = 1e-2


def random_sss(n: int, seed: int = 0) -> StateSpaceSystem:
    """Random stable SSS system A = -(G G^T + delta I) with positive b = c.

    delta shifts the spectrum so the largest eigenvalue is at most
    -STABILITY_MARGIN.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    gram = g @ g.T
    delta = max(0.0, STABILITY_MARGIN - float(np.linalg.eigvalsh(gram)[0]))
    a = -(gram + delta * np.eye(n))
    b = rng.uniform(0.5, 1.5, n)
    return StateSpaceSystem(a, b, b.copy())


def rc_ladder(n: int) -> StateSpaceSystem:
    """Nodal model of an n-node RC ladder with unit resistors and capacitors.

    The conductance matrix is symmetric tridiagonal (-2 on the diagonal, 1 on
    the off-diagonals) with -1 in the last node, which has no further
    neighbour; input and output are at the first node.
    """
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    a = np.zeros((n, n))
    np.fill_diagonal(a, -2.0)
    a[n - 1, n - 1] = -1.0
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    return StateSpaceSystem(a, b, b.copy())


def diagonal_sss(poles, residues) -> StateSpaceSystem:
    """Diagonal SSS system with the given real negative poles and positive residues."""
    lam = np.asarray(poles, dtype=float).reshape(-1)
    phi = np.asarray(residues, dtype=float).reshape(-1)
    if lam.size == 0 or lam.shape != phi.shape:
        raise ValueError(
            f'field "residues": expected length {lam.size}, got {phi.size}'
        )
    if np.any(lam >= 0):
        raise ValueError('field "poles": all poles must be strictly negative')
    if np.any(phi <= 0):
        raise ValueError('field "residues": all residues must be strictly positive')
    if min_pairwise_gap(lam) <= DEFLATION_RTOL * (1.0 + np.max(np.abs(lam))):
        raise ValueError('field "poles": poles must be pairwise distinct')
    order = np.argsort(lam)
    root = np.sqrt(phi[order])
    return StateSpaceSystem(np.diag(lam[order]), root, root.copy())


def generate(kind: str, n: int = 0, seed: int = 0, poles=None, residues=None) -> StateSpaceSystem:
    """Dispatch on generator kind (used by the command-line front end)."""
    if kind == KIND_RANDOM_SSS:
        return random_sss(n, seed)
    if kind == KIND_RC_LADDER:
        return rc_ladder(n)
    if kind == KIND_DIAGONAL:
        if poles is None or residues is None:
            raise ValueError("diagonal systems require poles and residues")
        return diagonal_sss(poles, residues)
    raise ValueError(f"unknown generator kind {kind!r}")
