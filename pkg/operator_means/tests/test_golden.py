import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from operator_means.golden import EXAMPLES, reproduce


class ExampleNineTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.report = reproduce('2.9')

    def comparison(self, label):
        return next(c for c in self.report.comparisons if c.label == label)

    def test_reproduced(self):
        self.assertTrue(self.report.ok)
        self.assertTrue(self.report.positive)
        self.assertTrue(self.report.inequality.holds)

    def test_arithmetic_mean_is_exact(self):
        assert_allclose(
            self.report.intermediates['arithmetic_mean'], [[2.125, 0.4665], [0.4665, 1.875]], atol=1e-15,
        )
        self.assertEqual(self.comparison('phi_p_arithmetic').computed, 8.0)

    def test_refined_matrix(self):
        self.assertLessEqual(self.comparison('refined').deviation, 5e-4)

    def test_difference(self):
        difference = self.report.intermediates['difference']
        self.assertAlmostEqual(difference, 1.0095, delta=1e-2)
        self.assertGreater(difference, 0)

    def test_alpha(self):
        self.assertAlmostEqual(self.report.inequality.alpha_used, 2.11653, places=5)


class ExampleTenTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.report = reproduce('2.10')

    def comparison(self, label):
        return next(c for c in self.report.comparisons if c.label == label)

    def test_reproduced(self):
        self.assertTrue(self.report.ok)
        self.assertGreater(self.report.difference_min_eigenvalue, 0)

    def test_map_is_unital_rotation(self):
        T = EXAMPLES['2.10'].phi.T
        assert_allclose(T.T @ T, np.eye(2), atol=1e-15)

    def test_printed_pipeline(self):
        for index in ('[0,0]', '[1,1]'):
            comparison = self.comparison(f'difference_from_printed_refined{index}')
            self.assertLessEqual(comparison.deviation, 2e-3)

    def test_off_diagonal_is_reported_only(self):
        comparison = self.comparison('difference[0,1]')
        self.assertFalse(comparison.asserted)
        self.assertTrue(comparison.ok)
        self.assertGreater(comparison.deviation, 0.5)
        self.assertLess(abs(comparison.computed), 0.1)

    def test_json(self):
        data = self.report.to_dict()
        self.assertEqual(data['example'], '2.10')
        self.assertEqual(data['params']['map']['variant'], 'isometry_congruence')
        self.assertTrue(data['difference_positive'])
