import math
import warnings

import numpy as np
from django.test import SimpleTestCase

from green.kernels import scalar_kernel
from green.models import PhysicalScene
from numerics.exceptions import ConditioningError, DomainError, ResolutionWarning, ShapeError
from numerics.models import Interval
from spectrum.models import SpectralDensity
from spectrum.transforms import green_spectrum
from waterfill.allocation import capacity_ssd, equivalent_noise
from waterfill.models import NoiseModel

from .covariance import (
    mutual_information, normalized_capacity_sweep, receive_covariance, resolve_source_sampling, white_noise_covariance,
)
from .models import SamplingLayout, SourceAutocorrelation, uniform_line


def exponential_source(support, beta=1.0, power=1.0):
    return SourceAutocorrelation.stationary(lambda lag: power * np.exp(-beta * np.abs(lag)), support)


def random_psd(rng, size, rank=None):
    rank = rank or size
    a = rng.standard_normal((size, rank)) + 1j * rng.standard_normal((size, rank))
    return a @ a.conj().T


def triple_loop_covariance(scene, layout, r_j):
    n, m = layout.dest_points.size, layout.source_points.size
    k_e = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            total = 0j
            for a in range(m):
                g_ia = scalar_kernel(scene, layout.dest_points[i] - layout.source_points[a])
                for b in range(m):
                    g_jb = scalar_kernel(scene, layout.dest_points[j] - layout.source_points[b])
                    r = complex(r_j.matrix([layout.source_points[a]], [layout.source_points[b]])[0, 0])
                    total += (layout.source_weights[a] * layout.source_weights[b]
                              * g_ia * r * g_jb.conjugate())
            k_e[i, j] = total
    return k_e


class TestSamplingLayout(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)

    def test_midpoint_lines(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 2), 4, Interval(-1, 1), 8)
        np.testing.assert_allclose(layout.source_points, [0.25, 0.75, 1.25, 1.75])
        self.assertAlmostEqual(layout.dest_weights.sum(), 2.0)
        self.assertEqual(layout.dest_size, 8)

    def test_three_dimensional_layout(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 1), 3, Interval(0, 1), 2, dim=3)
        self.assertEqual(layout.dest_points.shape, (2, 3))
        np.testing.assert_allclose(layout.dest_points[:, 1], 0.5)
        np.testing.assert_allclose(layout.source_points[:, 1], 0.0)
        self.assertEqual(layout.dest_size, 6)

    def test_invalid_layouts(self):
        points, weights = uniform_line(Interval(0, 1), 4)
        with self.assertRaises(DomainError):
            SamplingLayout(Interval(0, 1), Interval(0, 1), points, -weights, points, weights)
        with self.assertRaises(DomainError):
            SamplingLayout(Interval(0, 0.5), Interval(0, 1), points, weights, points, weights)
        with self.assertRaises(DomainError):
            uniform_line(Interval(0, 1), 4, dim=2)


class TestSourceAutocorrelation(SimpleTestCase):

    def test_zero_outside_support(self):
        r_j = exponential_source(Interval(0, 1))
        matrix = r_j.matrix([0.5, 2.0], [0.5, 2.0])
        self.assertEqual(matrix[0, 0], 1.0)
        self.assertEqual(matrix[1, 1], 0.0)
        self.assertEqual(matrix[0, 1], 0.0)

    def test_rejects_non_hermitian(self):
        with self.assertRaises(DomainError):
            SourceAutocorrelation.general(lambda s, t: np.exp(1j * s) + 0 * t, Interval(0, 1))

    def test_rejects_negative_power(self):
        with self.assertRaises(DomainError):
            SourceAutocorrelation.stationary(lambda lag: -np.ones_like(lag), Interval(0, 1))


class TestReceiveCovariance(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)

    def test_zero_source(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 1), 6, Interval(0, 1), 4)
        r_j = SourceAutocorrelation.stationary(lambda lag: 0.0 * lag, Interval(0, 1))
        np.testing.assert_array_equal(receive_covariance(self.scene, layout, r_j), np.zeros((4, 4)))

    def test_single_points(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 1), 1, Interval(0, 2), 1)
        r_j = SourceAutocorrelation.stationary(lambda lag: 2.5 + 0.0 * lag, Interval(0, 1))
        g = scalar_kernel(self.scene, 1.0 - 0.5)
        expected = 2.5 * abs(g) ** 2 * 1.0 ** 2
        value = receive_covariance(self.scene, layout, r_j)[0, 0]
        self.assertLess(abs(value - expected), 1e-12 * expected)

    def test_matches_triple_loop(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 1), 5, Interval(-0.5, 1.5), 8)
        for r_j in (
            exponential_source(Interval(0, 1), beta=2.0),
            SourceAutocorrelation.general(lambda s, t: np.where(np.abs(s - t) < 1e-12, 1.0, 0.0), Interval(0, 1)),
        ):
            k_e = receive_covariance(self.scene, layout, r_j)
            expected = triple_loop_covariance(self.scene, layout, r_j)
            self.assertLessEqual(np.max(np.abs(k_e - expected)), 1e-9 * np.max(np.abs(expected)))

    def test_hermitian_and_psd(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 2), 40, Interval(0, 2), 12)
        k_e = receive_covariance(self.scene, layout, exponential_source(Interval(0, 2)))
        self.assertLessEqual(np.max(np.abs(k_e - k_e.conj().T)), 1e-12 * np.max(np.abs(k_e)))
        self.assertGreaterEqual(np.linalg.eigvalsh(k_e).min(), -1e-12 * np.max(np.abs(k_e)))

    def test_three_dimensional_blocks(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 1), 10, Interval(0, 1), 3, dim=3)
        k_e = receive_covariance(self.scene, layout, exponential_source(Interval(0, 1)))
        self.assertEqual(k_e.shape, (9, 9))
        np.testing.assert_allclose(k_e, k_e.conj().T, atol=1e-12 * np.max(np.abs(k_e)))
        self.assertGreaterEqual(np.linalg.eigvalsh(k_e).min(), -1e-12 * np.max(np.abs(k_e)))

    def test_unresolved_source_warns(self):
        scene = PhysicalScene(wavelength=0.5, distance=0.5)
        layout = SamplingLayout.for_lines(scene, Interval(0, 4), 4, Interval(0, 4), 6)
        with self.assertWarns(ResolutionWarning):
            receive_covariance(scene, layout, exponential_source(Interval(0, 4)), check_resolution=True)

    def test_coarse_source_is_refined(self):
        scene = PhysicalScene(wavelength=1.0, distance=0.5)
        r_j = exponential_source(Interval(0, 4))
        layout = SamplingLayout.for_lines(scene, r_j.support, 8, Interval(1, 3), 4)
        with warnings.catch_warnings():
            warnings.simplefilter('error', ResolutionWarning)
            resolved, k_e = resolve_source_sampling(scene, layout, r_j)
        count = resolved.source_weights.size
        self.assertGreater(count, 8)
        self.assertEqual(count % 8, 0)
        np.testing.assert_array_equal(k_e, receive_covariance(scene, resolved, r_j))
        finer = receive_covariance(scene, resolved.with_source_count(2 * count), r_j)
        self.assertLessEqual(np.linalg.norm(finer - k_e), 0.01 * np.linalg.norm(finer))

    def test_resolved_source_is_kept(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 2), 64, Interval(0, 2), 4)
        resolved, _ = resolve_source_sampling(self.scene, layout, exponential_source(Interval(0, 2)))
        self.assertEqual(resolved.source_weights.size, 64)

    def test_refinement_cap_warns(self):
        scene = PhysicalScene(wavelength=1.0, distance=0.5)
        layout = SamplingLayout.for_lines(scene, Interval(0, 4), 8, Interval(1, 3), 4)
        with self.settings(EMCAP_SOURCE_REFINEMENTS=1):
            with self.assertWarns(ResolutionWarning):
                resolved, _ = resolve_source_sampling(scene, layout, exponential_source(Interval(0, 4)))
        self.assertEqual(resolved.source_weights.size, 16)

    def test_source_beyond_support(self):
        layout = SamplingLayout.for_lines(self.scene, Interval(0, 2), 4, Interval(0, 1), 4)
        with self.assertRaises(DomainError):
            receive_covariance(self.scene, layout, exponential_source(Interval(0, 1)))


class TestMutualInformation(SimpleTestCase):

    def test_no_signal(self):
        self.assertEqual(mutual_information(np.zeros((3, 3)), np.eye(3)), 0.0)

    def test_equal_signal_and_noise(self):
        self.assertAlmostEqual(mutual_information(np.eye(4), np.eye(4)), 4 * math.log(2), places=13)

    def test_determinant_ratio_oracle(self):
        rng = np.random.default_rng(6)
        k_e, k_n = random_psd(rng, 6, rank=3), random_psd(rng, 6) + 0.5 * np.eye(6)
        expected = math.log(abs(np.linalg.det(k_e + k_n)) / abs(np.linalg.det(k_n)))
        self.assertLess(abs(mutual_information(k_e, k_n) - expected), 1e-9 * max(1.0, expected))

    def test_extra_sample_never_hurts(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            k_e = random_psd(rng, 7, rank=4)
            k_n = np.diag(0.5 + rng.random(7))
            full = mutual_information(k_e, k_n)
            self.assertLessEqual(mutual_information(k_e[:6, :6], k_n[:6, :6]), full + 1e-12)
            self.assertGreaterEqual(full, 0.0)

    def test_unitary_invariance(self):
        rng = np.random.default_rng(21)
        k_e = random_psd(rng, 5)
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        k_n = 0.3 * np.eye(5)
        rotated = mutual_information(q @ k_e @ q.conj().T, q @ k_n @ q.conj().T)
        self.assertAlmostEqual(rotated, mutual_information(k_e, k_n), places=10)

    def test_errors(self):
        with self.assertRaises(ShapeError):
            mutual_information(np.eye(2), np.eye(3))
        with self.assertRaises(ConditioningError):
            mutual_information(np.eye(2), np.diag([1.0, 1e-13]))
        with self.assertRaises(DomainError):
            mutual_information(np.eye(2), np.diag([1.0, -1.0]))


class TestNormalizedCapacitySweep(SimpleTestCase):

    def test_zero_source_power(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        r_j = SourceAutocorrelation.stationary(lambda lag: 0.0 * lag, Interval(0, 4))
        sweep = normalized_capacity_sweep(scene, 2.0, [2, 4], r_j, 1.0)
        self.assertEqual([p.mi_nats for p in sweep], [0.0, 0.0])
        self.assertEqual([p.n for p in sweep], [4, 8])

    def test_sequence_settles(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        sweep = normalized_capacity_sweep(scene, 2.0, [4, 8, 16, 32], exponential_source(Interval(0, 4)), 1.0)
        values = [p.mi_per_meter for p in sweep]
        steps = [abs(b - a) for a, b in zip(values, values[1:])]
        self.assertTrue(all(b < a for a, b in zip(steps, steps[1:])))

    def test_low_snr_limit_matches_spectral_capacity(self):
        scene = PhysicalScene(wavelength=1.0, distance=0.5)
        variance, beta, length = 1e7, 1.0, 4.0
        r_j = exponential_source(Interval(-10, 14), beta=beta)
        sweep = normalized_capacity_sweep(
            scene, length, [8, 16], r_j, variance, dest_start=0.0, source_density=50
        )

        g_spec = green_spectrum(scene)
        kappa = g_spec.kappa
        s_j = SpectralDensity(g_spec.grid, 2 * beta / (beta ** 2 + kappa ** 2) / math.sqrt(2 * math.pi))
        noise_eq = equivalent_noise(NoiseModel.from_variance(variance), g_spec)
        expected = capacity_ssd(s_j, noise_eq)
        self.assertLess(abs(sweep[-1].mi_per_meter - expected), 0.1 * expected)

    def test_coarse_densities_refine_the_source(self):
        scene = PhysicalScene(wavelength=1.0, distance=0.5)
        r_j = exponential_source(Interval(0, 4))
        with warnings.catch_warnings():
            warnings.simplefilter('error', ResolutionWarning)
            sweep = normalized_capacity_sweep(scene, 2.0, [1, 2], r_j, 1.0)
        reference = normalized_capacity_sweep(scene, 2.0, [1, 2], r_j, 1.0, source_density=32)
        for point, expected in zip(sweep, reference):
            self.assertLess(abs(point.mi_nats - expected.mi_nats), 0.01 * expected.mi_nats)

    def test_unresolved_sweep_warns(self):
        scene = PhysicalScene(wavelength=1.0, distance=0.5)
        with self.settings(EMCAP_SOURCE_REFINEMENTS=1):
            with self.assertWarns(ResolutionWarning):
                normalized_capacity_sweep(scene, 2.0, [1, 2], exponential_source(Interval(0, 4)), 1.0)

    def test_densities_must_increase(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        with self.assertRaises(DomainError):
            normalized_capacity_sweep(scene, 1.0, [4, 2], exponential_source(Interval(0, 1)), 1.0)

    def test_white_noise_scales_with_weights(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        layout = SamplingLayout.for_lines(scene, Interval(0, 1), 2, Interval(0, 1), 4)
        np.testing.assert_allclose(np.diag(white_noise_covariance(layout, 2.0)), 8.0)
