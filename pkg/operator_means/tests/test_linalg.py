import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from operator_means.exceptions import (
    ConditioningError,
    ConvergenceError,
    DimensionMismatch,
    FunctionalCalculusError,
    InputError,
    NotPositiveDefinite,
)
from operator_means.linalg import (
    SpdMatrix,
    SpectralBounds,
    SymMatrix,
    TolerancePolicy,
    apply_function,
    block_norm_check,
    eigh,
    inverse,
    loewner_leq,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    power,
    psd_power,
    spectral_norm,
    spectrum_within,
    sqrtm,
)
from operator_means.sampling import sample_spd


def random_symmetric(n, rng):
    G = rng.standard_normal((n, n))
    return SymMatrix(G + G.T)


def random_psd(n, rng, rank=None):
    G = rng.standard_normal((n, rank or n))
    return SymMatrix(G @ G.T)


class JacobiTests(SimpleTestCase):
    def test_reconstruction_and_orthogonality(self):
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            n = int(rng.integers(1, 9))
            A = random_symmetric(n, rng)
            dec = eigh(A)
            scale = max(1.0, A.frobenius_norm())
            residual = np.linalg.norm(dec.reconstruct() - A.data)
            self.assertLessEqual(residual, 1e-12 * scale, f'trial {trial}, n={n}')
            self.assertLessEqual(dec.orthogonality_residual(), 1e-12, f'trial {trial}, n={n}')

    def test_eigenvalues_sorted_descending(self):
        rng = np.random.default_rng(7)
        A = random_symmetric(6, rng)
        values = eigh(A).values
        self.assertTrue(np.all(values[:-1] >= values[1:]))

    def test_agrees_with_lapack(self):
        rng = np.random.default_rng(11)
        for n in range(1, 7):
            A = random_symmetric(n, rng)
            expected = np.sort(np.linalg.eigvalsh(A.data))[::-1]
            assert_allclose(eigh(A).values, expected, rtol=0, atol=1e-12 * max(1.0, A.frobenius_norm()))

    def test_diagonal_and_scalar_inputs(self):
        dec = eigh(SymMatrix.diag([2.0, 5.0, -1.0]))
        assert_allclose(dec.values, [5.0, 2.0, -1.0])
        self.assertEqual(eigh(SymMatrix([[3.5]])).values.tolist(), [3.5])

    def test_repeated_eigenvalues(self):
        dec = eigh(SymMatrix.identity(4) * 2.0)
        assert_allclose(dec.values, [2.0] * 4)
        self.assertLessEqual(dec.orthogonality_residual(), 1e-14)

    @override_settings(OPERATOR_MEANS={'JACOBI_MAX_SWEEPS': 0})
    def test_convergence_error_when_sweeps_exhausted(self):
        with self.assertRaises(ConvergenceError):
            eigh(SymMatrix([[2.0, 1.0], [1.0, 2.0]]))

    def test_decomposition_is_cached(self):
        A = SymMatrix([[2.0, 1.0], [1.0, 3.0]])
        self.assertIs(A.decomposition, A.decomposition)


class SymMatrixTests(SimpleTestCase):
    def test_construction_symmetrizes(self):
        A = SymMatrix([[1.0, 2.0], [2.0 + 1e-12, 1.0]])
        self.assertEqual(A.data[0, 1], A.data[1, 0])

    def test_data_is_read_only(self):
        A = SymMatrix([[1.0, 0.0], [0.0, 1.0]])
        with self.assertRaises(ValueError):
            A.data[0, 0] = 5.0

    def test_rejects_bad_shapes_and_values(self):
        with self.assertRaises(InputError):
            SymMatrix([[1.0, 2.0, 3.0]])
        with self.assertRaises(InputError):
            SymMatrix([[1.0, math.nan], [math.nan, 1.0]])
        with self.assertRaises(InputError):
            SymMatrix(np.zeros((0, 0)))

    def test_dimension_mismatch_on_arithmetic(self):
        with self.assertRaises(DimensionMismatch):
            SymMatrix.identity(2) + SymMatrix.identity(3)

    def test_spd_rejects_indefinite(self):
        with self.assertRaises(NotPositiveDefinite):
            SpdMatrix([[1.0, 2.0], [2.0, 1.0]])

    def test_spd_bounds(self):
        bounds = SpdMatrix.diag([1.0, 3.0]).bounds
        self.assertAlmostEqual(bounds.m, 1.0)
        self.assertAlmostEqual(bounds.M, 3.0)

    def test_spectral_bounds_validation(self):
        with self.assertRaises(InputError):
            SpectralBounds(3.0, 1.0)
        with self.assertRaises(InputError):
            SpectralBounds(0.0, 1.0)
        self.assertAlmostEqual(SpectralBounds(1.0, 3.0).kantorovich, 4.0 / 3.0)


class FunctionalCalculusTests(SimpleTestCase):
    def setUp(self):
        self.A = SpdMatrix([[4.0, 1.0], [1.0, 3.0]])

    def test_square_root_squares_back(self):
        root = sqrtm(self.A)
        assert_allclose(root.data @ root.data, self.A.data, atol=1e-12)

    def test_inverse(self):
        assert_allclose(inverse(self.A).data @ self.A.data, np.eye(2), atol=1e-12)

    def test_power_zero_and_one(self):
        assert_allclose(power(self.A, 0).data, np.eye(2))
        self.assertIs(power(self.A, 1), self.A)

    def test_integer_power_of_indefinite_matrix(self):
        assert_allclose(power(SymMatrix.diag([-1.0, 2.0]), 2).data, np.diag([1.0, 4.0]), atol=1e-14)

    def test_fractional_power_of_singular_matrix(self):
        with self.assertRaises(ConditioningError):
            power(SymMatrix.diag([1.0, 0.0]), 0.5)

    def test_function_undefined_on_spectrum(self):
        with self.assertRaises(FunctionalCalculusError):
            apply_function(SymMatrix.diag([-1.0, 1.0]), math.sqrt)
        with self.assertRaises(FunctionalCalculusError):
            apply_function(SymMatrix.diag([0.0, 1.0]), lambda t: 1.0 / t)

    def test_psd_power_accepts_roundoff_negatives(self):
        tiny = SymMatrix.diag([1.0, -1e-14])
        assert_allclose(psd_power(tiny, 2.0).data, np.diag([1.0, 0.0]), atol=1e-15)
        assert_allclose(psd_power(SymMatrix.zeros(3), 0.5).data, np.zeros((3, 3)))
        with self.assertRaises(NotPositiveDefinite):
            psd_power(SymMatrix.diag([1.0, -0.5]), 2.0)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=5),
        st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_power_matches_eigenvalues(self, values, p):
        A = SpdMatrix.diag(values)
        expected = sorted((v ** p for v in values), reverse=True)
        assert_allclose(power(A, p).eigenvalues, expected, rtol=1e-12)


class NormAndOrderTests(SimpleTestCase):
    def test_operator_and_spectral_norms(self):
        self.assertAlmostEqual(operator_norm(SymMatrix.diag([-3.0, 1.0])), 3.0)
        self.assertAlmostEqual(spectral_norm(np.array([[0.0, 2.0], [0.0, 0.0]])), 2.0)

    def test_loewner_order(self):
        one, two = SymMatrix.identity(2), SymMatrix.identity(2) * 2.0
        result = loewner_leq(one, two)
        self.assertTrue(result.holds)
        self.assertAlmostEqual(result.gap, 1.0)
        self.assertFalse(loewner_leq(two, one).holds)
        self.assertTrue(loewner_leq(one, one).holds)

    def test_loewner_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            loewner_leq(SymMatrix.identity(2), SymMatrix.identity(3))

    def test_tolerance_policy(self):
        self.assertEqual(TolerancePolicy(rel=1e-6).tolerance(10.0), 1e-6 * 10.0)
        self.assertEqual(TolerancePolicy(rel=1e-6).tolerance(0.1), 1e-6)
        self.assertEqual(TolerancePolicy(rel=1e-6, absolute=1e-3).tolerance(1e9), 1e-3)
        self.assertTrue(TolerancePolicy(rel=1e-6).accepts(-5e-7))
        self.assertFalse(TolerancePolicy(rel=1e-6).accepts(-2e-6))

    def test_spectrum_within(self):
        A = SpdMatrix.diag([1.0, 3.0])
        self.assertTrue(spectrum_within(A, SpectralBounds(1.0, 3.0)).holds)
        self.assertFalse(spectrum_within(A, SpectralBounds(1.5, 3.0)).holds)

    def test_block_norm_check(self):
        X = np.array([[0.0, 2.0], [0.0, 0.0]])
        self.assertTrue(block_norm_check(X, 2.0))
        self.assertFalse(block_norm_check(X, 1.9))
        self.assertTrue(block_norm_check(np.zeros((2, 2)), 0.0))
        self.assertFalse(block_norm_check(np.eye(3), 0.5))

    def test_block_norm_check_agrees_with_norm(self):
        rng = np.random.default_rng(314)
        for trial in range(200):
            n = int(rng.integers(1, 6))
            X = rng.standard_normal((n, n))
            norm = spectral_norm(X)
            assert_allclose(norm, np.linalg.norm(X, 2), rtol=1e-10)
            factor = 1.0 + rng.uniform(0.01, 0.5) * (1 if trial % 2 else -1)
            t = norm * factor
            self.assertEqual(block_norm_check(X, t), norm <= t, f'trial {trial}, n={n}')

    def test_power_is_operator_monotone(self):
        rng = np.random.default_rng(1729)
        bounds = SpectralBounds(0.5, 4.0)
        for trial in range(200):
            n = int(rng.integers(1, 6))
            A = sample_spd(n, bounds, rng)
            B = SpdMatrix(A.data + random_psd(n, rng, rank=int(rng.integers(1, n + 1))).data)
            self.assertTrue(loewner_leq(A, B).holds)
            for p in (0.25, 0.5, 0.75, 1.0):
                result = loewner_leq(power(A, p), power(B, p))
                self.assertTrue(result.holds, f'trial {trial}, n={n}, p={p}, gap={result.gap}')

    def test_loewner_order_is_antisymmetric(self):
        rng = np.random.default_rng(2718)
        bounds = SpectralBounds(1.0, 3.0)
        for trial in range(200):
            n = int(rng.integers(1, 6))
            A = sample_spd(n, bounds, rng)
            if trial % 2:
                B = SymMatrix(A.data + 1e-13 * random_symmetric(n, rng).data)
            else:
                B = sample_spd(n, bounds, rng)
            forward, backward = loewner_leq(A, B), loewner_leq(B, A)
            if trial % 2:
                self.assertTrue(forward.holds and backward.holds)
            if forward.holds and backward.holds:
                self.assertLessEqual(operator_norm(B - A), max(forward.tolerance, backward.tolerance))

    def test_loewner_order_is_transitive(self):
        rng = np.random.default_rng(1618)
        bounds = SpectralBounds(1.0, 3.0)
        for trial in range(200):
            n = int(rng.integers(1, 6))
            A = sample_spd(n, bounds, rng)
            B = A + random_psd(n, rng)
            C = B + random_psd(n, rng, rank=1)
            self.assertTrue(loewner_leq(A, B).holds and loewner_leq(B, C).holds)
            self.assertTrue(loewner_leq(A, C).holds, f'trial {trial}, n={n}')


class MatrixJsonTests(SimpleTestCase):
    def test_reads_symmetric_matrix(self):
        A = matrix_from_json({'n': 2, 'data': [[2.0, 1.0], [1.0, 2.0]]})
        assert_allclose(A.data, [[2.0, 1.0], [1.0, 2.0]])
        self.assertEqual(matrix_to_json(A), {'n': 2, 'data': [[2.0, 1.0], [1.0, 2.0]]})

    def test_rejects_asymmetric_matrix(self):
        with self.assertRaisesMessage(InputError, 'not symmetric'):
            matrix_from_json({'n': 2, 'data': [[2.0, 1.0], [0.0, 2.0]]}, 'A')

    def test_rejects_wrong_shape(self):
        with self.assertRaises(InputError):
            matrix_from_json({'n': 3, 'data': [[1.0, 0.0], [0.0, 1.0]]})
        with self.assertRaises(InputError):
            matrix_from_json([[1.0]])
