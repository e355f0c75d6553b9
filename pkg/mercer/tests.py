import math
import warnings

import numpy as np
from django.test import SimpleTestCase

from green.models import PhysicalScene
from numerics.exceptions import DomainError, NotPositiveSemidefiniteError, ResolutionWarning
from numerics.models import Interval
from numerics.quadrature import integrate
from sampled.covariance import mutual_information, receive_covariance, white_noise_covariance
from sampled.models import SamplingLayout, SourceAutocorrelation

from .expansion import (
    exp_kernel_modes, information_curve, mercer_mutual_information, mercer_vs_ssd_limit, mode_count_for,
    mode_residual, nystrom_from_matrix, nystrom_modes, receive_kernel_modes, ssd_capacity,
)
from .models import ExponentialKernelParams, MercerSpectrum


def bisect_first_mode(alpha, length):
    lo, hi = 0.0, math.pi / length
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 2 * math.atan(mid / alpha) + mid * length - math.pi > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestExponentialKernelParams(SimpleTestCase):

    def test_validation(self):
        with self.assertRaises(DomainError):
            ExponentialKernelParams(power=1.0, alpha=0.0, length=1.0)
        with self.assertRaises(DomainError):
            ExponentialKernelParams(power=-1.0, alpha=1.0, length=1.0)

    def test_with_length(self):
        params = ExponentialKernelParams(power=2.0, alpha=1.0, length=1.0).with_length(3.0)
        self.assertEqual(params.length, 3.0)
        self.assertEqual(params.trace, 6.0)


class TestClosedFormModes(SimpleTestCase):

    def setUp(self):
        self.params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)
        self.spectrum = exp_kernel_modes(self.params, 12)

    def test_first_mode(self):
        omega = bisect_first_mode(1.0, 1.0)
        self.assertAlmostEqual(self.spectrum.frequencies[0], omega, places=11)
        self.assertAlmostEqual(self.spectrum.frequencies[0], 1.3065, places=3)
        self.assertAlmostEqual(self.spectrum.eigenvalues[0], 2 / (1 + omega ** 2), places=11)

    def test_mode_equation_residuals(self):
        k = np.arange(1, 13)
        residual = mode_residual(self.params, self.spectrum.frequencies, k)
        self.assertLessEqual(np.max(np.abs(residual)), 1e-10)

    def test_long_spectrum_residuals(self):
        params = self.params.with_length(8.0)
        count = mode_count_for(params)
        spectrum = exp_kernel_modes(params, count, samples=0)
        residual = mode_residual(params, spectrum.frequencies, np.arange(1, count + 1))
        self.assertLessEqual(np.max(np.abs(residual)), 1e-10)
        self.assertFalse(spectrum.is_sampled)

    def test_frequencies_approach_multiples_of_pi(self):
        omega = self.spectrum.frequencies
        gap = np.abs(omega - np.arange(1, 13) * math.pi)
        self.assertTrue(np.all(np.diff(gap[4:]) < 0))
        self.assertTrue(np.all(np.diff(self.spectrum.eigenvalues) < 0))

    def test_orthonormal_samples(self):
        np.testing.assert_allclose(self.spectrum.gram(), np.eye(12), atol=1e-6)

    def test_noise_projection(self):
        np.testing.assert_allclose(self.spectrum.noise_gram(3.0), 1.5 * np.eye(12), atol=1e-5)

    def test_sign_convention(self):
        phi = self.spectrum.eigenfunctions
        self.assertTrue(np.all(phi[1] > phi[0]))

    def test_integral_equation(self):
        p = self.params
        for k in range(5):
            omega, norm = self.spectrum.frequencies[k], self.spectrum.normalizations[k]

            def phi(r):
                return (omega * math.cos(omega * r) + p.alpha * math.sin(omega * r)) / norm

            for r_prime in (0.0, 0.3, 0.77, 1.0):
                value = integrate(
                    lambda r: p.power * math.exp(-p.alpha * abs(r - r_prime)) * phi(r),
                    Interval(0.0, p.length), 1e-12, points=(r_prime,),
                )
                residual = abs(self.spectrum.eigenvalues[k] * phi(r_prime) - value)
                self.assertLessEqual(residual, 1e-6 * self.spectrum.eigenvalues[0])

    def test_trace_exhaustion(self):
        spectrum = exp_kernel_modes(self.params, 60, samples=2049)
        middle = 1024
        partial = [spectrum.reconstruct_diagonal(k)[middle] for k in (5, 20, 40, 60)]
        self.assertTrue(all(a <= b for a, b in zip(partial, partial[1:])))
        self.assertGreaterEqual(partial[-1], 0.99 * self.params.power)

    def test_invalid_count(self):
        with self.assertRaises(DomainError):
            exp_kernel_modes(self.params, 0)


class TestNystromModes(SimpleTestCase):

    def test_rank_one_kernel(self):
        spectrum = nystrom_modes(lambda r, s: (r + 1) * (s + 1), 1.0, 257, 4)
        self.assertLess(abs(spectrum.eigenvalues[0] - 7 / 3), 1e-5 * 7 / 3)
        self.assertLess(spectrum.eigenvalues[1], 1e-10)
        phi = spectrum.eigenfunctions[:, 0]
        ratio = phi / (spectrum.nodes + 1)
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)

    def test_matches_closed_form(self):
        params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)
        numerical = nystrom_modes(params.kernel, 1.0, 512, 5)
        closed = exp_kernel_modes(params, 5)
        np.testing.assert_allclose(numerical.eigenvalues, closed.eigenvalues, rtol=1e-4)
        np.testing.assert_allclose(numerical.gram(), np.eye(5), atol=1e-10)

    def test_trace_identity(self):
        params = ExponentialKernelParams(power=1.5, alpha=2.0, length=1.0)
        spectrum = nystrom_modes(params.kernel, 1.0, 400, 100)
        self.assertLess(abs(spectrum.trace - 1.5), 1e-3 * 1.5)
        self.assertLessEqual(np.sum(spectrum.eigenvalues), spectrum.trace * (1 + 1e-12))

    def test_rejects_indefinite_kernel(self):
        with self.assertRaises(NotPositiveSemidefiniteError):
            nystrom_modes(lambda r, s: np.cos(3 * (r - s)) - 0.9, 1.0, 64, 4)

    def test_grid_too_coarse(self):
        with self.assertRaises(DomainError):
            nystrom_modes(lambda r, s: np.exp(-abs(r - s)), 1.0, 15, 4)


class TestMercerInformation(SimpleTestCase):

    def test_single_mode(self):
        spectrum = MercerSpectrum(eigenvalues=np.array([0.5]), length=1.0, trace=0.5)
        information = mercer_mutual_information(spectrum, 1.0)
        self.assertAlmostEqual(information.nats, math.log(2), places=14)
        self.assertEqual(information.tail_bound, 0.0)

    def test_vanishes_with_strong_noise(self):
        spectrum = exp_kernel_modes(ExponentialKernelParams(1.0, 1.0, 2.0), 200, samples=0)
        values = [mercer_mutual_information(spectrum, n0).nats for n0 in (1.0, 1e3, 1e6, 1e9)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))
        self.assertLess(values[-1], 1e-8)

    def test_tail_bound_covers_truncation(self):
        params = ExponentialKernelParams(1.0, 1.0, 2.0)
        short = mercer_mutual_information(exp_kernel_modes(params, 10, samples=0), 1.0)
        long = mercer_mutual_information(exp_kernel_modes(params, 5000, samples=0), 1.0)
        self.assertLessEqual(long.nats - short.nats, short.tail_bound)

    def test_rejects_bad_noise(self):
        spectrum = MercerSpectrum(eigenvalues=np.array([0.5]), length=1.0, trace=0.5)
        with self.assertRaises(DomainError):
            mercer_mutual_information(spectrum, 0.0)


class TestInformationCurve(SimpleTestCase):

    def setUp(self):
        self.params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)

    def test_increasing_and_asymptotically_linear(self):
        curve = dict((length, info.nats) for length, info in information_curve(self.params, range(1, 33), 1.0))
        values = [curve[float(length)] for length in range(1, 33)]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))
        early = (curve[16.0] - curve[8.0]) / 8
        late = (curve[24.0] - curve[16.0]) / 8
        self.assertLess(abs(early - late), 0.05 * late)

    def test_nystrom_method_agrees(self):
        closed = information_curve(self.params, [1.0, 2.0], 1.0)
        numerical = information_curve(self.params, [1.0, 2.0], 1.0, method='nystrom')
        for (_, a), (_, b) in zip(closed, numerical):
            self.assertLess(abs(a.nats - b.nats), 1e-3 * a.nats)

    def test_unknown_method(self):
        with self.assertRaises(DomainError):
            information_curve(self.params, [1.0], 1.0, method='guess')


class TestSsdLimit(SimpleTestCase):

    def test_closed_form_integral(self):
        params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)
        self.assertAlmostEqual(ssd_capacity(params, 1.0), math.sqrt(5) - 1, places=10)

    def test_per_meter_information_approaches_limit(self):
        params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)
        per_meter, limit = mercer_vs_ssd_limit(params, 1.0)
        self.assertLess(abs(per_meter - limit), 0.03 * limit)

    def test_limits_vanish_with_noise_and_grow_with_power(self):
        params = ExponentialKernelParams(power=1.0, alpha=1.0, length=1.0)
        per_meter, limit = mercer_vs_ssd_limit(params, 1e9)
        self.assertLess(per_meter, 1e-8)
        self.assertLess(limit, 1e-8)
        self.assertLess(ssd_capacity(params, 1.0), ssd_capacity(ExponentialKernelParams(2.0, 1.0, 1.0), 1.0))


class TestReceiveKernelModes(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=1.0, distance=0.5)
        self.r_j = SourceAutocorrelation.stationary(lambda lag: np.exp(-np.abs(lag)), Interval(-1.0, 3.0))

    def test_modes_are_orthonormal(self):
        spectrum = receive_kernel_modes(self.scene, self.r_j, 2.0, 48, 12, source_count=200)
        self.assertEqual(spectrum.count, 12)
        np.testing.assert_allclose(spectrum.gram(), np.eye(12), atol=1e-10)
        self.assertLessEqual(np.sum(spectrum.eigenvalues), spectrum.trace * (1 + 1e-12))

    def test_full_expansion_matches_sampled_information(self):
        n0, n = 2.0, 48
        layout = SamplingLayout.for_lines(self.scene, self.r_j.support, 200, Interval(0.0, 2.0), n)
        k_e = receive_covariance(self.scene, layout, self.r_j)
        spectrum = nystrom_from_matrix(k_e, layout.dest_points, layout.dest_weights, n, 2.0)
        expected = mutual_information(k_e, white_noise_covariance(layout, n0 / 2))
        self.assertLess(abs(mercer_mutual_information(spectrum, n0).nats - expected), 1e-8 * expected)

    def test_coarse_source_count_is_refined(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error', ResolutionWarning)
            coarse = receive_kernel_modes(self.scene, self.r_j, 2.0, 48, 12, source_count=8)
        fine = receive_kernel_modes(self.scene, self.r_j, 2.0, 48, 12, source_count=800)
        self.assertLess(abs(coarse.eigenvalues[0] - fine.eigenvalues[0]), 0.05 * fine.eigenvalues[0])

    def test_grid_too_coarse(self):
        with self.assertRaises(DomainError):
            receive_kernel_modes(self.scene, self.r_j, 2.0, 20, 6, source_count=50)
