"""Core system representations, transfer evaluation, and taxonomy."""

import numpy as np
import pytest

import irkalab as il
from irkalab.errors import RepeatedPoles, SingularShift, UnstableSystem


def scalar_system(pole=-1.0, b=1.0, c=1.0):
    return il.StateSpaceSystem([[pole]], [b], [c])


class TestEvalTransfer:
    def test_scalar_value(self):
        assert il.eval_transfer(scalar_system(), 1.0, 0) == pytest.approx(0.5)

    def test_scalar_first_derivative(self):
        assert il.eval_transfer(scalar_system(), 1.0, 1) == pytest.approx(-0.25)

    def test_second_derivative_matches_finite_differences(self):
        sysm = il.random_sss(8, seed=42)
        s, h = 2.0, 1e-4
        fd = (
            il.eval_transfer(sysm, s + h)
            - 2.0 * il.eval_transfer(sysm, s)
            + il.eval_transfer(sysm, s - h)
        ) / h**2
        exact = il.eval_transfer(sysm, s, 2)
        assert abs(fd - exact) < 1e-6 * abs(exact)

    @pytest.mark.parametrize("order", [1, 2])
    def test_derivatives_match_lower_order_differences(self, order):
        sysm = il.random_sss(7, seed=3)
        for s in (0.5, 3.0, 1.0 + 2.0j):
            h = 1e-5 * (abs(s) + 1.0)
            fd = (
                il.eval_transfer(sysm, s + h, order - 1)
                - il.eval_transfer(sysm, s - h, order - 1)
            ) / (2.0 * h)
            exact = il.eval_transfer(sysm, s, order)
            assert abs(fd - exact) <= 1e-5 * (1.0 + abs(exact))

    def test_conjugate_symmetry(self):
        sysm = il.random_sss(6, seed=11)
        for k in (0, 1, 2):
            v = il.eval_transfer(sysm, 1.5 + 0.7j, k)
            w = il.eval_transfer(sysm, 1.5 - 0.7j, k)
            assert w == pytest.approx(v.conjugate(), rel=1e-12)

    def test_singular_shift_raises(self):
        sysm = il.diagonal_sss([-1.0, -2.0], [1.0, 1.0])
        with pytest.raises(SingularShift):
            il.eval_transfer(sysm, -1.0)

    def test_bad_order_rejected(self):
        with pytest.raises(ValueError):
            il.eval_transfer(scalar_system(), 1.0, 3)


class TestPoleResidue:
    def test_diagonal_system(self):
        pr = il.to_pole_residue(il.diagonal_sss([-1.0, -2.0], [1.0, 1.0]))
        assert np.allclose(np.sort(pr.poles.real), [-2.0, -1.0])
        assert np.allclose(pr.residues.real, [1.0, 1.0])

    def test_scaled_output(self):
        pr = il.to_pole_residue(scalar_system(-1.0, 1.0, 2.0))
        assert pr.poles[0] == pytest.approx(-1.0)
        assert pr.residues[0] == pytest.approx(2.0)

    def test_symmetric_tridiagonal_residues_sum_to_b_dot_c(self, rng):
        # Residues of a symmetric realization are squares; their sum is c^T b.
        n = 6
        a = np.diag(rng.uniform(-6.0, -4.0, n))
        off = rng.uniform(0.2, 0.9, n - 1)
        idx = np.arange(n - 1)
        a[idx, idx + 1] = off
        a[idx + 1, idx] = off
        eigs = np.linalg.eigvalsh(a)
        assert eigs.min() > -10 and eigs.max() < -1
        sysm = il.StateSpaceSystem(a, np.ones(n), np.ones(n))
        pr = il.to_pole_residue(sysm)
        assert np.all(pr.residues.real >= -1e-12)
        assert np.sum(pr.residues.real) == pytest.approx(6.0, rel=1e-12)

    def test_general_route_with_left_right_eigenvectors(self, rng):
        from helpers import random_general_stable

        sysm = random_general_stable(rng, 7)
        pr = il.to_pole_residue(sysm)
        for s in (1.0, 4.0, 0.3 + 1.1j):
            direct = il.eval_transfer(sysm, s)
            assert abs(pr.evaluate(s) - direct) < 1e-9 * (1.0 + abs(direct))

    def test_repeated_poles_raise(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -1.0]), [1.0, 1.0], [1.0, 1.0])
        with pytest.raises(RepeatedPoles):
            il.to_pole_residue(sysm)

    def test_partial_fraction_consistency_on_grid(self, rng):
        sysm = il.random_sss(9, seed=5)
        pr = il.to_pole_residue(sysm)
        pts = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), 50))
        for s in pts:
            h = il.eval_transfer(sysm, s)
            assert abs(h - pr.evaluate(s)) < 1e-9 * (1.0 + abs(h))

    def test_conjugate_closure_enforced(self):
        with pytest.raises(ValueError):
            il.PoleResidueForm([-1.0 + 1.0j, -2.0], [1.0, 1.0])

    def test_real_block_realization_of_complex_pairs(self):
        pr = il.PoleResidueForm(
            [-1.0 + 2.0j, -1.0 - 2.0j, -3.0],
            [0.5 + 0.25j, 0.5 - 0.25j, 2.0],
        )
        sysm = pr.to_system()
        assert sysm.n == 3
        for s in (0.7, 2.0, 1.0 + 1.0j):
            assert abs(il.eval_transfer(sysm, s) - pr.evaluate(s)) < 1e-12 * (
                1.0 + abs(pr.evaluate(s))
            )


class TestClassify:
    def test_diagonal_sss_is_also_zip(self):
        cls = il.classify(il.diagonal_sss([-1.0, -2.0], [1.0, 1.0]))
        assert cls.label == "SSS"
        assert cls.is_sss and cls.is_zip

    def test_negative_residue_is_general(self):
        sysm = il.StateSpaceSystem([[-1.0, 0.0], [0.0, -2.0]], [1.0, 1.0], [1.0, -1.0])
        cls = il.classify(sysm)
        assert cls.label == "GENERAL"
        assert not cls.is_zip

    def test_coupled_two_by_two_by_hand(self):
        # Eigenvectors (1, 1)/sqrt(2) and (1, -1)/sqrt(2): poles -1 and -3,
        # residues (q^T b)^2 = 1/2 each for b = e_1.
        sysm = il.StateSpaceSystem([[-2.0, 1.0], [1.0, -2.0]], [1.0, 0.0], [1.0, 0.0])
        cls = il.classify(sysm)
        assert cls.label == "SSS"
        pr = cls.pole_residue
        assert np.allclose(np.sort(pr.poles.real), [-3.0, -1.0])
        assert np.allclose(pr.residues.real, [0.5, 0.5])

    def test_zip_without_symmetry(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -2.0]), [1.0, 2.0], [1.0, 0.5])
        cls = il.classify(sysm)
        assert cls.label == "ZIP"
        assert cls.is_zip and not cls.is_sss

    def test_repeated_pole_sss_still_zip_after_merge(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -1.0]), [1.0, 1.0], [1.0, 1.0])
        cls = il.classify(sysm)
        assert cls.label == "SSS"
        assert cls.is_zip  # transfer function is 2/(s+1)

    def test_classification_is_total_for_defective_general_matrix(self):
        a = np.array([[-1.0, 1.0], [0.0, -1.0]])  # Jordan block
        cls = il.classify(il.StateSpaceSystem(a, [1.0, 1.0], [1.0, 0.0]))
        assert cls.label == "GENERAL"


class TestMinimalRealization:
    def test_drops_unobservable_mode(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -2.0]), [1.0, 0.0], [1.0, 0.0])
        red = il.minimal_sss_realization(sysm)
        assert red.n == 1
        assert red.a[0, 0] == pytest.approx(-1.0)
        assert red.b[0] == pytest.approx(1.0)

    def test_merges_repeated_pole(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -1.0]), [1.0, 1.0], [1.0, 1.0])
        red = il.minimal_sss_realization(sysm)
        assert red.n == 1
        assert red.a[0, 0] == pytest.approx(-1.0)
        assert red.b[0] == pytest.approx(np.sqrt(2.0))

    def test_transfer_preserved_after_deflation(self, rng):
        from helpers import sample_points, transfer_close

        lam = -np.sort(np.exp(rng.uniform(np.log(0.1), np.log(30.0), 10)))[::-1]
        phi = rng.uniform(0.3, 2.0, 10)
        phi[[2, 5, 8]] = 0.0
        q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        a = q @ np.diag(lam) @ q.T
        b = q @ np.sqrt(phi)
        sysm = il.StateSpaceSystem(0.5 * (a + a.T), b, b.copy())
        red = il.minimal_sss_realization(sysm)
        assert red.n == 7
        assert transfer_close(sysm, red, sample_points(rng, sysm, 20), 1e-10)
        assert il.classify(red).is_zip

    def test_unstable_rejected(self):
        sysm = il.StateSpaceSystem(np.diag([1.0, -2.0]), [1.0, 1.0], [1.0, 1.0])
        with pytest.raises(UnstableSystem):
            il.minimal_sss_realization(sysm)

    def test_non_sss_rejected(self):
        sysm = il.StateSpaceSystem(np.diag([-1.0, -2.0]), [1.0, 1.0], [1.0, -1.0])
        with pytest.raises(ValueError):
            il.minimal_sss_realization(sysm)


class TestValidation:
    def test_dimension_mismatch_names_field(self):
        with pytest.raises(ValueError, match='"b"'):
            il.StateSpaceSystem(np.eye(2), [1.0], [1.0, 2.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match='"A"'):
            il.StateSpaceSystem([[np.nan]], [1.0], [1.0])

    def test_arrays_are_frozen(self):
        sysm = scalar_system()
        with pytest.raises(ValueError):
            sysm.a[0, 0] = 5.0
