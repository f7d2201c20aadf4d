import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from operator_means.exceptions import DimensionMismatch, InputError
from operator_means.linalg import SpdMatrix, SpectralBounds, inverse, loewner_leq
from operator_means.means import (
    MeanDescriptor,
    MeanKind,
    arithmetic_mean,
    geometric_mean,
    harmonic_mean,
    mean_family,
    power_mean,
    refinement_term,
    weight_r,
)
from operator_means.sampling import sample_spd

positive = st.floats(min_value=0.1, max_value=20.0)
weights = st.floats(min_value=0.0, max_value=1.0)


class ScalarOracleTests(SimpleTestCase):
    """On 1 x 1 matrices every mean is its scalar formula."""

    @settings(max_examples=60, deadline=None)
    @given(positive, positive, weights)
    def test_scalar_means(self, a, b, nu):
        A, B = SpdMatrix([[a]]), SpdMatrix([[b]])
        assert_allclose(arithmetic_mean(A, B, nu).data[0, 0], (1 - nu) * a + nu * b, rtol=1e-12)
        assert_allclose(geometric_mean(A, B, nu).data[0, 0], a ** (1 - nu) * b ** nu, rtol=1e-12)
        assert_allclose(harmonic_mean(A, B, nu).data[0, 0], 1 / ((1 - nu) / a + nu / b), rtol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(positive, positive, weights, st.sampled_from([-1.0, -0.5, 0.25, 0.5, 1.0]))
    def test_scalar_power_mean(self, a, b, nu, t):
        A, B = SpdMatrix([[a]]), SpdMatrix([[b]])
        expected = ((1 - nu) * a ** t + nu * b ** t) ** (1 / t)
        assert_allclose(power_mean(A, B, nu, t).data[0, 0], expected, rtol=1e-10)


class MatrixMeanTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(3)
        self.bounds = SpectralBounds(0.5, 5.0)

    def pair(self, n=3):
        return sample_spd(n, self.bounds, self.rng), sample_spd(n, self.bounds, self.rng)

    def test_commuting_geometric_mean(self):
        A, B = SpdMatrix.diag([1.0, 4.0]), SpdMatrix.diag([4.0, 1.0])
        assert_allclose(geometric_mean(A, B, 0.5).data, np.diag([2.0, 2.0]), atol=1e-13)

    def test_diagonal_means_act_entrywise(self):
        A, B = SpdMatrix.diag([1.0, 2.0, 9.0]), SpdMatrix.diag([4.0, 8.0, 1.0])
        assert_allclose(
            geometric_mean(A, B, 0.25).data,
            np.diag([1.0 ** 0.75 * 4.0 ** 0.25, 2.0 ** 0.75 * 8.0 ** 0.25, 9.0 ** 0.75]),
            atol=1e-12,
        )

    def test_endpoints(self):
        A, B = self.pair()
        for mean in (arithmetic_mean, geometric_mean, harmonic_mean):
            self.assertIs(mean(A, B, 0.0), A)
            self.assertIs(mean(A, B, 1.0), B)
            self.assertIs(geometric_mean(A, A, 0.3), A)

    def test_geometric_mean_symmetry(self):
        for _ in range(20):
            A, B = self.pair()
            assert_allclose(
                geometric_mean(A, B, 0.3).data, geometric_mean(B, A, 0.7).data, atol=1e-10,
            )

    def test_geometric_mean_congruence_invariance(self):
        for trial in range(100):
            n = int(self.rng.integers(1, 5))
            A, B = self.pair(n)
            nu = float(self.rng.choice([0.25, 0.5, 0.75, self.rng.uniform()]))
            Q = np.linalg.qr(self.rng.standard_normal((n, n)))[0]
            X = Q * self.rng.uniform(0.5, 2.0, n)
            moved = X.T @ geometric_mean(A, B, nu).data @ X
            expected = geometric_mean(SpdMatrix(X.T @ A.data @ X), SpdMatrix(X.T @ B.data @ X), nu)
            assert_allclose(moved, expected.data, atol=1e-10 * np.linalg.norm(moved), err_msg=f'trial {trial}')

    def test_riccati_equation(self):
        A, B = self.pair(4)
        G = geometric_mean(A, B, 0.5)
        assert_allclose(G.data @ inverse(A).data @ G.data, B.data, atol=1e-10)

    def test_harmonic_geometric_arithmetic_order(self):
        for _ in range(30):
            A, B = self.pair(int(self.rng.integers(1, 5)))
            nu = float(self.rng.uniform())
            H, G, M = harmonic_mean(A, B, nu), geometric_mean(A, B, nu), arithmetic_mean(A, B, nu)
            self.assertTrue(loewner_leq(H, G).holds)
            self.assertTrue(loewner_leq(G, M).holds)

    def test_power_mean_endpoints(self):
        A, B = self.pair()
        assert_allclose(power_mean(A, B, 0.4, 1.0).data, arithmetic_mean(A, B, 0.4).data, atol=1e-10)
        assert_allclose(power_mean(A, B, 0.4, -1.0).data, harmonic_mean(A, B, 0.4).data, atol=1e-10)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            arithmetic_mean(SpdMatrix.identity(2), SpdMatrix.identity(3), 0.5)

    def test_invalid_weight(self):
        A, B = self.pair()
        with self.assertRaises(InputError):
            geometric_mean(A, B, 1.5)
        with self.assertRaises(InputError):
            weight_r(-0.1)


class RefinementTermTests(SimpleTestCase):
    def test_positive_semidefinite(self):
        rng = np.random.default_rng(5)
        bounds = SpectralBounds(1.0, 3.0)
        for _ in range(30):
            A, B = sample_spd(3, bounds, rng), sample_spd(3, bounds, rng)
            R = refinement_term(A, B, float(rng.uniform()), bounds)
            self.assertGreaterEqual(R.lambda_min, -1e-10)

    def test_vanishes_at_endpoints_and_equal_inputs(self):
        bounds = SpectralBounds(1.0, 3.0)
        A, B = SpdMatrix.diag([1.0, 2.0]), SpdMatrix.diag([3.0, 1.5])
        for nu in (0.0, 1.0):
            self.assertEqual(refinement_term(A, B, nu, bounds).frobenius_norm(), 0.0)
        self.assertEqual(refinement_term(A, A, 0.5, bounds).frobenius_norm(), 0.0)

    def test_weight_r(self):
        self.assertEqual(weight_r(0.25), 0.25)
        self.assertEqual(weight_r(0.75), 0.25)
        self.assertEqual(weight_r(0.5), 0.5)


class MeanDescriptorTests(SimpleTestCase):
    def test_family(self):
        family = mean_family(0.3)
        self.assertEqual(len(family), 7)
        self.assertTrue(all(mean.nu == 0.3 for mean in family))
        self.assertEqual(family[0].kind, MeanKind.ARITHMETIC)

    def test_power_needs_exponent(self):
        with self.assertRaises(InputError):
            MeanDescriptor(MeanKind.POWER, 0.5)
        with self.assertRaises(InputError):
            MeanDescriptor.power(0.5, 2.0)
        with self.assertRaises(InputError):
            MeanDescriptor(MeanKind.GEOMETRIC, 0.5, 0.5)
        with self.assertRaises(InputError):
            MeanDescriptor('median', 0.5)

    def test_apply_dispatches(self):
        A, B = SpdMatrix.diag([1.0, 4.0]), SpdMatrix.diag([4.0, 1.0])
        assert_allclose(MeanDescriptor.geometric().apply(A, B).data, np.diag([2.0, 2.0]), atol=1e-13)
        self.assertEqual(MeanDescriptor.power(0.5, -0.5).as_dict(), {'kind': 'power', 'nu': 0.5, 't': -0.5})
