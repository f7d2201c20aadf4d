import os
import time
from unittest import skipUnless

import numpy as np
from django.test import SimpleTestCase

from operator_means.conf import VerifierSettings
from operator_means.exceptions import InputError
from operator_means.inequalities import InequalityId
from operator_means.linalg import SpectralBounds, eigh
from operator_means.sampling import (
    DEFAULT_BOUNDS,
    DEFAULT_DIMS,
    DEFAULT_NU_GRID,
    DEFAULT_P_GRID,
    SampleConfig,
    build_trial,
    run_suite,
    run_trial,
    sample_isometry,
    sample_orthogonal,
    sample_spd,
    sample_unit_vector,
)


class SamplerTests(SimpleTestCase):
    def test_spd_spectrum_within_bounds(self):
        rng = np.random.default_rng(0)
        bounds = SpectralBounds(1.0, 3.0)
        for _ in range(500):
            A = sample_spd(4, bounds, rng)
            values = eigh(A.data).values
            self.assertGreaterEqual(values[-1], bounds.m - 1e-12)
            self.assertLessEqual(values[0], bounds.M + 1e-12)

    def test_spd_pins_extreme_eigenvalues(self):
        A = sample_spd(3, SpectralBounds(0.5, 50.0), np.random.default_rng(4))
        self.assertEqual(A.lambda_max, 50.0)
        self.assertEqual(A.lambda_min, 0.5)

    def test_one_by_one(self):
        A = sample_spd(1, SpectralBounds(3.0, 7.0), np.random.default_rng(2))
        self.assertTrue(3.0 <= A.data[0, 0] <= 7.0)

    def test_same_seed_same_matrix(self):
        bounds = SpectralBounds(1.0, 3.0)
        first = sample_spd(5, bounds, np.random.default_rng(12))
        second = sample_spd(5, bounds, np.random.default_rng(12))
        self.assertTrue(np.array_equal(first.data, second.data))

    def test_orthogonal(self):
        rng = np.random.default_rng(8)
        for n in range(1, 8):
            Q = sample_orthogonal(n, rng)
            self.assertLessEqual(np.linalg.norm(Q.T @ Q - np.eye(n)), 1e-12)

    def test_isometry(self):
        T = sample_isometry(5, 2, np.random.default_rng(1))
        self.assertEqual(T.shape, (5, 2))
        self.assertLessEqual(np.linalg.norm(T.T @ T - np.eye(2)), 1e-12)
        with self.assertRaises(InputError):
            sample_isometry(2, 3, np.random.default_rng(1))

    def test_unit_vector(self):
        x = sample_unit_vector(6, np.random.default_rng(3))
        self.assertAlmostEqual(np.linalg.norm(x), 1.0, places=14)


class SampleConfigTests(SimpleTestCase):
    def test_validation(self):
        for kwargs in (
            {'trials': 0},
            {'dims': ()},
            {'dims': (0,)},
            {'seed': -1},
            {'nu_grid': (1.5,)},
            {'p_grid': (0.0,)},
            {'alpha_scale': 0.0},
        ):
            with self.subTest(**kwargs):
                with self.assertRaises(InputError):
                    SampleConfig(**kwargs)

    def test_grid_covers_every_point(self):
        config = SampleConfig(dims=(1, 2), nu_grid=(0.0, 0.5), p_grid=(1.0, 3.0))
        points = {
            (n, nu, p, bounds.m) for n, nu, p, bounds in map(config.grid_point, range(config.grid_size))
        }
        self.assertEqual(config.grid_size, 24)
        self.assertEqual(len(points), 24)
        self.assertEqual(config.grid_point(0), config.grid_point(config.grid_size))

    def test_default_grid_is_a_bijection(self):
        config = SampleConfig()
        points = {
            (n, nu, p, bounds) for n, nu, p, bounds in map(config.grid_point, range(config.grid_size))
        }
        self.assertEqual(config.grid_size, 450)
        self.assertEqual(len(points), 450)

    def test_every_axis_covered_early(self):
        config = SampleConfig()
        first = [config.grid_point(trial) for trial in range(len(DEFAULT_DIMS))]
        self.assertEqual({point[0] for point in first}, set(DEFAULT_DIMS))
        self.assertEqual({point[1] for point in first}, set(DEFAULT_NU_GRID))
        self.assertEqual({point[2] for point in first}, set(DEFAULT_P_GRID))
        self.assertEqual({point[3] for point in first}, set(DEFAULT_BOUNDS))

    def test_single_dimension_still_covers_exponents(self):
        config = SampleConfig(dims=(2,))
        exponents = {config.grid_point(trial)[2] for trial in range(len(DEFAULT_P_GRID))}
        self.assertEqual(exponents, set(DEFAULT_P_GRID))

    def test_build_trial_inputs(self):
        config = SampleConfig(dims=(3,))
        rng = np.random.default_rng(5)
        params, inputs = build_trial(InequalityId.COR_2_14, config, 3, 0.5, 1.0, SpectralBounds(1.0, 3.0), rng)
        self.assertTrue(1 <= len(inputs.pairs) <= 3)
        self.assertIsNotNone(params.polya_szego)
        params, inputs = build_trial(InequalityId.HOA_FU, config, 3, 0.25, 1.0, SpectralBounds(1.0, 3.0), rng)
        self.assertEqual(params.mean_sigma.nu, params.mean_tau.nu)
        params, inputs = build_trial(InequalityId.PROP_2_15, config, 3, 0.5, 1.0, SpectralBounds(1.0, 3.0), rng)
        self.assertEqual(inputs.x.shape, (3,))

    def test_run_trial_is_deterministic(self):
        config = SampleConfig(dims=(2, 3), trials=5)
        self.assertEqual(
            run_trial(config, InequalityId.THM_2_7_A, 17, 4),
            run_trial(config, InequalityId.THM_2_7_A, 17, 4),
        )


class SuiteTests(SimpleTestCase):
    def test_catalog_has_no_failures(self):
        config = SampleConfig(dims=(1, 2, 3), nu_grid=(0.25, 0.5), p_grid=(1.0, 3.0), trials=24, seed=42)
        report = run_suite(config, list(InequalityId))
        self.assertEqual(report.total_failures, 0, report.to_json())
        for key, tally in report.results.items():
            self.assertEqual(tally.passed + tally.failed + tally.rejected, 24, key)

    def test_report_independent_of_workers(self):
        config = SampleConfig(dims=(1, 2, 3), trials=20, seed=7)
        ids = [InequalityId.HOA_FU, InequalityId.THM_2_7_A, InequalityId.LEMMA_2_3]
        self.assertEqual(run_suite(config, ids).to_json(), run_suite(config, ids, workers=3).to_json())

    def test_seed_changes_report(self):
        ids = [InequalityId.THM_2_7_A]
        first = run_suite(SampleConfig(dims=(2,), trials=10, seed=1), ids)
        second = run_suite(SampleConfig(dims=(2,), trials=10, seed=2), ids)
        self.assertNotEqual(first.results['THM_2_7_A'].worst_gap, second.results['THM_2_7_A'].worst_gap)

    def test_fault_injection_is_detected(self):
        config = SampleConfig(
            dims=(1, 2, 3), bounds=(SpectralBounds(1.0, 3.0),), trials=50, alpha_scale=0.5,
        )
        with self.assertLogs('operator_means.sampling', level='WARNING'), \
                self.assertLogs('operator_means.inequalities', level='WARNING'):
            report = run_suite(config, [InequalityId.THM_2_7_A])
        self.assertGreaterEqual(report.results['THM_2_7_A'].failed, 1)
        self.assertFalse(report.ok)

    def test_out_of_range_exponent_is_rejected_not_failed(self):
        config = SampleConfig(dims=(2,), p_grid=(3.0,), trials=5)
        tally = run_suite(config, [InequalityId.P_LE_2]).results['P_LE_2']
        self.assertEqual(tally.rejected, 5)
        self.assertEqual(tally.failed, 0)

    def test_unknown_id(self):
        with self.assertRaises(InputError):
            run_suite(SampleConfig(trials=1), ['NOT_AN_ID'])

    def test_small_suite_reaches_high_exponents(self):
        ids = [InequalityId.FU_HE, InequalityId.FU_HE_MAPS, InequalityId.LEMMA_2_2]
        report = run_suite(SampleConfig(trials=50), ids)
        for key, tally in report.results.items():
            with self.subTest(id=key):
                self.assertGreater(tally.passed, 0)
                self.assertEqual(tally.failed, 0)


@skipUnless(os.environ.get('SLOW'), 'set SLOW=1 to run the full default suite')
class FullSuiteTimingTests(SimpleTestCase):
    def test_default_suite_within_a_minute(self):
        started = time.monotonic()
        report = run_suite(SampleConfig(seed=42), list(InequalityId), workers=VerifierSettings.load().workers)
        elapsed = time.monotonic() - started
        self.assertEqual(report.total_failures, 0, report.to_json())
        self.assertLess(elapsed, 60.0)
