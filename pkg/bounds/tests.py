import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import toeplitz

from green.kernels import scalar_kernel
from green.models import PhysicalScene
from numerics.exceptions import DomainError, NotPositiveSemidefiniteError, ResolutionWarning
from numerics.models import Interval
from sampled.covariance import receive_covariance
from sampled.models import SamplingLayout, SourceAutocorrelation

from .chain import (
    entropy_sum_check, mi_chain_check, mi_finite_finite, mi_source_shift_sweep, random_source_autocorrelation,
    resolve_source_count, run_chain_trials, stationarize, trial_seed, virtual_line_source,
)
from .models import StationarizedSource


def random_psd(rng, size):
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return a @ a.conj().T


def brute_force_mi(scene, r_j, variance, n):
    """Determinant ratio on midpoint grids, both lines sampled at n points."""
    h = r_j.support.width / n
    points = r_j.support.lo + (np.arange(n) + 0.5) * h
    gw = np.array([[scalar_kernel(scene, r - s) * h for s in points] for r in points])
    r = np.array([[complex(r_j.pairwise(s, t)) for t in points] for s in points])
    k_e = gw @ r @ gw.conj().T
    k_n = variance / h * np.eye(n)
    return math.log(abs(np.linalg.det(k_e + k_n)) / abs(np.linalg.det(k_n)))


class TestStationarize(SimpleTestCase):

    def test_constant_source_is_triangular(self):
        r_j = SourceAutocorrelation.stationary(lambda lag: 2.0 + 0.0 * lag, Interval(0, 1))
        source = stationarize(r_j)
        lags = np.array([0.0, 0.25, -0.5, 0.9, 1.0, 1.5])
        np.testing.assert_allclose(source.autocorrelation(lags), 2.0 * np.clip(1 - np.abs(lags), 0, None), atol=1e-10)

    def test_narrow_ridge(self):
        eps = 0.01
        r_j = SourceAutocorrelation.stationary(lambda lag: np.exp(-lag ** 2 / (2 * eps ** 2)), Interval(0, 1))
        lags = np.array([0.0, 0.01, 0.02])
        expected = (1 - lags) * np.exp(-lags ** 2 / (2 * eps ** 2))
        np.testing.assert_allclose(stationarize(r_j).autocorrelation(lags), expected, atol=1e-9)

    def test_hermitian_lag_symmetry(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(3))
        source = stationarize(r_j)
        lags = np.array([0.1, 0.37, 0.8])
        forward, backward = source.autocorrelation(lags), source.autocorrelation(-lags)
        np.testing.assert_allclose(forward, np.conj(backward), atol=1e-10)
        self.assertGreaterEqual(source.autocorrelation(0.0).real, 0.0)

    def test_toeplitz_covariance_is_psd(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(11))
        source = stationarize(r_j)
        column = source.autocorrelation(0.05 * np.arange(40))
        values = np.linalg.eigvalsh(toeplitz(column, np.conj(column)))
        self.assertGreaterEqual(values.min(), -1e-9 * values.max())

    def test_rejects_indefinite_source(self):
        r_j = SourceAutocorrelation.stationary(lambda lag: np.cos(3 * lag) - 0.9, Interval(0, 1))
        with self.assertRaises(NotPositiveSemidefiniteError):
            stationarize(r_j)

    def test_invalid_period(self):
        with self.assertRaises(DomainError):
            StationarizedSource(period=0.0, lag_fn=np.zeros_like)


class TestVirtualLineSource(SimpleTestCase):

    def test_shift_average_is_toeplitz_inside_truncation(self):
        n, m = 16, 3
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(5))
        virtual = virtual_line_source(r_j, m, n)
        nodes, _ = virtual.support.midpoints((2 * m + 1) * n)
        inner = nodes[:2 * m * n]
        matrix = virtual.matrix(inner, inner)
        scale = np.max(np.abs(matrix))
        for lag in range(-n, n + 1):
            band = np.diagonal(matrix, offset=lag)
            self.assertLessEqual(np.max(np.abs(band - band[0])), 1e-9 * scale)

    def test_discrete_average_of_constant_source(self):
        n = 16
        r_j = SourceAutocorrelation.stationary(lambda lag: 2.0 + 0.0 * lag, Interval(0, 1))
        virtual = virtual_line_source(r_j, 3, n)
        nodes, _ = virtual.support.midpoints(7 * n)
        row = virtual.matrix(nodes[3 * n:3 * n + 1], nodes[3 * n:5 * n])[0]
        expected = 2.0 * np.clip(1 - np.arange(2 * n) / n, 0, None)
        np.testing.assert_allclose(row, expected, atol=1e-12)

    def test_support_spans_truncated_periods(self):
        r_j = SourceAutocorrelation.stationary(lambda lag: np.exp(-np.abs(lag)), Interval(2, 3))
        virtual = virtual_line_source(r_j, 4, 8)
        self.assertEqual((virtual.support.lo, virtual.support.hi), (-2.0, 7.0))

    def test_invalid_arguments(self):
        r_j = SourceAutocorrelation.stationary(lambda lag: np.exp(-np.abs(lag)), Interval(0, 1))
        with self.assertRaises(DomainError):
            virtual_line_source(r_j, -1, 8)
        with self.assertRaises(DomainError):
            virtual_line_source(r_j, 3, 0)


class TestFiniteMutualInformation(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)

    def test_zero_source(self):
        r_j = SourceAutocorrelation.stationary(lambda lag: 0.0 * lag, Interval(0, 1))
        self.assertEqual(mi_finite_finite(self.scene, r_j, 1e4, 16), 0.0)

    def test_matches_brute_force(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(8))
        expected = brute_force_mi(self.scene, r_j, 1e4, 8)
        self.assertLess(abs(mi_finite_finite(self.scene, r_j, 1e4, 8) - expected), 1e-9 * expected)

    def test_translation_invariance(self):
        here = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(4))
        there = random_source_autocorrelation(Interval(3, 4), np.random.default_rng(4))
        a = mi_finite_finite(self.scene, here, 1e4, 16)
        b = mi_finite_finite(self.scene, there, 1e4, 16)
        self.assertLess(abs(a - b), 1e-9 * a)

    def test_shift_sweep_never_below_aligned_destination(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(9))
        count = resolve_source_count(self.scene, r_j, 16)
        i_ll = mi_finite_finite(self.scene, r_j, 1e4, 16, source_count=count)
        sweep = mi_source_shift_sweep(self.scene, r_j, 1e4, 16)
        self.assertEqual(len(sweep), 17)
        self.assertEqual(sweep[0][0], 0.0)
        self.assertAlmostEqual(sweep[-1][0], -1.0)
        self.assertGreaterEqual(min(mi for _, mi in sweep), i_ll * (1 - 1e-9))


class TestChainCheck(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)

    def test_chain_holds(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(1))
        check = mi_chain_check(self.scene, r_j, 1e4)
        self.assertTrue(check.holds)
        self.assertTrue(check.stable)
        self.assertGreater(check.i_ll, 0.0)
        self.assertLessEqual(check.i_ll, check.i_l2l * (1 + 1e-9))
        count = resolve_source_count(self.scene, r_j, 16)
        self.assertEqual(check.i_ll, mi_finite_finite(self.scene, r_j, 1e4, 16, source_count=count))

    def test_source_sampling_is_resolved(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(1))
        count = resolve_source_count(self.scene, r_j, 16)
        self.assertGreaterEqual(count, 16)
        self.assertEqual(count % 16, 0)
        wide = Interval(-1, 1)
        coarse = receive_covariance(
            self.scene, SamplingLayout.for_lines(self.scene, r_j.support, count, wide, 32), r_j,
        )
        fine = receive_covariance(
            self.scene, SamplingLayout.for_lines(self.scene, r_j.support, 2 * count, wide, 32), r_j,
        )
        self.assertLessEqual(np.linalg.norm(fine - coarse), 0.01 * np.linalg.norm(fine))

    def test_unresolved_source_warns(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(1))
        with self.settings(EMCAP_SOURCE_REFINEMENTS=1), mock.patch('sampled.covariance.RESOLUTION_TOLERANCE', 0.0):
            with self.assertWarns(ResolutionWarning):
                self.assertEqual(resolve_source_count(self.scene, r_j, 16), 32)

    def test_translation_invariance(self):
        here = mi_chain_check(self.scene, random_source_autocorrelation(Interval(0, 1), np.random.default_rng(2)), 1e4)
        there = mi_chain_check(self.scene, random_source_autocorrelation(Interval(5, 6), np.random.default_rng(2)), 1e4)
        for a, b in ((here.i_ll, there.i_ll), (here.i_l2l, there.i_l2l), (here.i_inf2l, there.i_inf2l)):
            self.assertLess(abs(a - b), 1e-9 * a)

    def test_grid_requirements(self):
        r_j = random_source_autocorrelation(Interval(0, 1), np.random.default_rng(1))
        with self.assertRaises(DomainError):
            mi_chain_check(self.scene, r_j, 1e4, n=8, shifts=8)
        with self.assertRaises(DomainError):
            mi_chain_check(self.scene, r_j, 1e4, n=24, shifts=16)
        with self.assertRaises(DomainError):
            mi_chain_check(self.scene, r_j, 1e4, truncation=2)


class TestEntropySumCheck(SimpleTestCase):

    def test_zero_extra_signal(self):
        self.assertTrue(entropy_sum_check(np.eye(3), np.zeros((3, 3)), np.eye(3)))

    def test_identity_triple(self):
        self.assertTrue(entropy_sum_check(np.eye(4), np.eye(4), np.eye(4)))

    def test_random_triples(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            k_x, k_y, k_n = random_psd(rng, 8), random_psd(rng, 8), random_psd(rng, 8) + np.eye(8)
            self.assertTrue(entropy_sum_check(k_x, k_y, k_n))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(DomainError):
            entropy_sum_check(np.triu(np.ones((3, 3))), np.zeros((3, 3)), np.eye(3))


class TestChainTrials(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)

    def test_fifty_random_sources_satisfy_chain(self):
        results = run_chain_trials(self.scene, 1.0, trials=50, seed=0)
        self.assertEqual([r.trial for r in results], list(range(50)))
        self.assertEqual(len({r.seed for r in results}), 50)
        for result in results:
            with self.subTest(trial=result.trial):
                self.assertTrue(result.check.holds)
                self.assertTrue(result.check.stable)
                self.assertLessEqual(result.check.i_ll, result.check.i_l2l * (1 + 1e-9))
        self.assertEqual(results[3].seed, trial_seed(0, 3))

    def test_thread_count_does_not_change_results(self):
        serial = run_chain_trials(self.scene, 1.0, trials=4, seed=11)
        with self.settings(EMCAP_THREADS=4):
            threaded = run_chain_trials(self.scene, 1.0, trials=4, seed=11)
        self.assertEqual(serial, threaded)

    def test_seeds_are_distinct(self):
        seeds = {trial_seed(0, t) for t in range(100)}
        self.assertEqual(len(seeds), 100)
