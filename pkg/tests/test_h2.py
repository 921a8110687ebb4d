"""H2 norms and the two error routes, checked against independent oracles."""

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg as sla

import irkalab as il
from irkalab.errors import ResidualTooLarge, UnstableMatrix


def pole_residue_norm_sq(lam, phi, lamt=None, phit=None):
    """Closed-form ||H - H_r||^2 from double sums over poles (oracle)."""
    lam = np.asarray(lam, dtype=float)
    phi = np.asarray(phi, dtype=float)
    total = np.sum(phi[:, None] * phi[None, :] / (-(lam[:, None] + lam[None, :])))
    if lamt is None:
        return float(total)
    lamt = np.asarray(lamt, dtype=float)
    phit = np.asarray(phit, dtype=float)
    total -= 2.0 * np.sum(phi[:, None] * phit[None, :] / (-(lam[:, None] + lamt[None, :])))
    total += np.sum(phit[:, None] * phit[None, :] / (-(lamt[:, None] + lamt[None, :])))
    return float(total)


class TestLyapunovSolve:
    def test_scalar(self):
        p = il.lyapunov_solve(np.array([[-1.0]]), np.array([[1.0]]))
        assert p[0, 0] == pytest.approx(0.5)

    def test_diagonal_closed_form(self):
        p = il.lyapunov_solve(np.diag([-1.0, -2.0]), np.ones((2, 2)))
        assert np.allclose(p, [[0.5, 1.0 / 3.0], [1.0 / 3.0, 0.25]])

    def test_matches_quadrature_of_state_response(self):
        sysm = il.random_sss(10, seed=21)
        a = sysm.a - 0.5 * np.eye(10)  # decay fast enough that T=50 captures the tail
        b = sysm.b
        p = il.lyapunov_solve(a, np.outer(b, b))

        def integrand(t):
            x = sla.expm(a * t) @ b
            return np.outer(x, x)

        quad, _ = scipy.integrate.quad_vec(integrand, 0.0, 50.0, epsabs=1e-12, epsrel=1e-10)
        assert np.max(np.abs(quad - p)) < 1e-5 * np.max(np.abs(p))

    def test_nonsymmetric_route(self):
        rng = np.random.default_rng(31)
        g = rng.standard_normal((6, 6))
        a = g - (np.max(np.linalg.eigvals(g).real) + 1.0) * np.eye(6)
        rhs = rng.standard_normal((6, 6))
        rhs = rhs + rhs.T
        p = il.lyapunov_solve(a, rhs)
        assert np.max(np.abs(a @ p + p @ a.T + rhs)) < 1e-10 * (1 + np.max(np.abs(rhs)))

    def test_unstable_matrix_rejected(self):
        with pytest.raises(UnstableMatrix):
            il.lyapunov_solve(np.array([[1.0]]), np.array([[1.0]]))

    def test_asymmetric_rhs_rejected(self):
        with pytest.raises(ValueError):
            il.lyapunov_solve(np.diag([-1.0, -2.0]), np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestH2Norm:
    def test_scalar(self):
        sysm = il.StateSpaceSystem([[-1.0]], [1.0], [1.0])
        assert il.h2_norm(sysm) == pytest.approx(np.sqrt(0.5))

    def test_two_pole_closed_form(self, two_pole_system):
        assert il.h2_norm(two_pole_system) == pytest.approx(np.sqrt(17.0 / 12.0))

    def test_matches_pole_residue_double_sum(self, rng):
        lam = -np.sort(np.exp(rng.uniform(np.log(0.1), np.log(20.0), 8)))[::-1]
        phi = rng.uniform(0.2, 2.5, 8)
        sysm = il.diagonal_sss(lam, phi)
        expected = np.sqrt(pole_residue_norm_sq(lam, phi))
        assert il.h2_norm(sysm) == pytest.approx(expected, rel=1e-9)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableMatrix):
            il.h2_norm(il.StateSpaceSystem([[0.5]], [1.0], [1.0]))


class TestH2Error:
    def test_exact_copy_has_zero_error(self, two_pole_system):
        rep = il.h2_error(two_pole_system, two_pole_system)
        assert rep.error_norm_gramian < 1e-10
        assert rep.pole_collision  # identical poles force the gramian-only route

    def test_routes_agree_with_closed_form(self, two_pole_system):
        for lamt, phit in [(-1.7, 0.9), (-0.4, 2.0), (-3.0, 0.2)]:
            red = il.diagonal_sss([lamt], [phit])
            rep = il.h2_error(two_pole_system, red)
            expected = pole_residue_norm_sq([-1.0, -2.0], [1.0, 1.0], [lamt], [phit])
            assert rep.cost_j == pytest.approx(expected, rel=1e-9)
            assert rep.error_norm_gramian**2 == pytest.approx(expected, rel=1e-9)
            assert rep.route_discrepancy < 1e-9

    def test_relative_error_uses_full_norm(self, two_pole_system):
        red = il.diagonal_sss([-1.5], [1.5])
        rep = il.h2_error(two_pole_system, red)
        assert rep.relative_h2_error == pytest.approx(
            rep.error_norm_gramian / il.h2_norm(two_pole_system)
        )

    def test_pole_collision_flagged_and_gramian_reported(self, two_pole_system):
        red = il.diagonal_sss([-1.0], [0.5])  # shares the pole at -1
        rep = il.h2_error(two_pole_system, red)
        assert rep.pole_collision
        assert rep.cost_j is None
        assert rep.error_norm_pole_residue is None
        assert np.isfinite(rep.error_norm_gramian)

    def test_route_agreement_on_seeded_pairs(self, rng):
        worst = 0.0
        for trial in range(20):
            n = int(rng.integers(5, 20))
            full = il.random_sss(n, seed=int(rng.integers(0, 2**31)))
            r = int(rng.integers(1, 4))
            q, _ = np.linalg.qr(rng.standard_normal((n, r)))
            ar = q.T @ full.a @ q
            red = il.StateSpaceSystem(0.5 * (ar + ar.T), q.T @ full.b, q.T @ full.b)
            rep = il.h2_error(full, red)
            if rep.pole_collision:
                continue
            worst = max(worst, rep.route_discrepancy)
        assert worst < 1e-7

    def test_cost_is_nonnegative(self, rng):
        for trial in range(10):
            full = il.random_sss(8, seed=trial)
            red = il.diagonal_sss([-0.7 - 0.3 * trial], [1.0 + 0.1 * trial])
            rep = il.h2_error(full, red)
            assert rep.cost_j >= -1e-10

    def test_triangle_consistency(self, two_pole_system):
        red = il.diagonal_sss([-1.3], [1.2])
        rep = il.h2_error(two_pole_system, red)
        assert rep.error_norm_gramian <= il.h2_norm(two_pole_system) + il.h2_norm(red) + 1e-9

    def test_monotone_for_nested_interpolation_bases(self, rng):
        # Nested rational-Krylov subspaces sharing leading columns: the wider
        # space does not do worse.
        for trial in range(15):
            n = int(rng.integers(8, 20))
            sysm = il.random_sss(n, seed=int(rng.integers(0, 2**31)))
            mags = np.abs(sysm.poles().real)
            r = int(rng.integers(1, 5))
            shifts = np.exp(rng.uniform(np.log(mags.min()), np.log(mags.max()), r + 1))
            cols = [np.linalg.solve(s * np.eye(n) - sysm.a, sysm.b) for s in shifts]
            q = np.zeros((n, 0))
            for col in cols:
                u = col - q @ (q.T @ col)
                u = u - q @ (q.T @ u)
                q = np.column_stack([q, u / np.linalg.norm(u)])

            def compress(k):
                qk = q[:, :k]
                ar = qk.T @ sysm.a @ qk
                br = qk.T @ sysm.b
                return il.StateSpaceSystem(0.5 * (ar + ar.T), br, br.copy())

            e_small = il.h2_error(sysm, compress(r)).error_norm_gramian
            e_large = il.h2_error(sysm, compress(r + 1)).error_norm_gramian
            assert e_large <= e_small + 1e-10


class TestCostOracle:
    def test_converged_cost_matches_grid_search(self, two_pole_system):
        # Brute-force oracle: dense log grid over (pole, residue) of an
        # order-1 model, then simplex refinement of the best cell.
        from scipy.optimize import minimize

        lam = np.array([-1.0, -2.0])
        phi = np.array([1.0, 1.0])

        def cost(lt, pt):
            return pole_residue_norm_sq(lam, phi, [lt], [pt])

        lts = -np.logspace(-2, 2, 400)
        pts = np.logspace(-2, 2, 400)
        best = np.inf
        arg = (lts[0], pts[0])
        for lt in lts:
            row = [cost(lt, pt) for pt in pts]
            j = int(np.argmin(row))
            if row[j] < best:
                best, arg = row[j], (lt, pts[j])
        res = minimize(
            lambda x: cost(-np.exp(x[0]), np.exp(x[1])),
            [np.log(-arg[0]), np.log(arg[1])],
            method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 4000},
        )
        oracle_min = res.fun

        trace = il.run_irka(two_pole_system, il.IrkaConfig(r=1), il.initial_shifts(two_pole_system, 1))
        rep = il.h2_error(two_pole_system, trace.final_model)
        assert rep.cost_j == pytest.approx(oracle_min, rel=1e-5)
