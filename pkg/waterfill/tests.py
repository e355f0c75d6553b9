import math

import numpy as np
from django.test import SimpleTestCase
from scipy import linalg as scipy_linalg

from green.models import PhysicalScene
from numerics.exceptions import DomainError, ShapeError
from spectrum.models import SpectralDensity, WavenumberGrid
from spectrum.transforms import green_spectrum

from .allocation import capacity_ssd, equivalent_noise, kkt_covariance_allocate, water_level, waterfill_ssd
from .models import NoiseModel


def flat_transfer(grid, gain):
    return SpectralDensity(grid, np.full(grid.count, gain, dtype=complex), kind='transfer')


class TestNoiseModel(SimpleTestCase):

    def test_variance_to_density(self):
        noise = NoiseModel.from_variance(2.0)
        self.assertAlmostEqual(noise.white_ssd, 2.0 / math.sqrt(2 * math.pi), places=15)

    def test_rejects_non_positive_noise(self):
        with self.assertRaises(DomainError):
            NoiseModel.white(0.0)
        grid = WavenumberGrid.linspace(-1, 1, 3)
        with self.assertRaises(DomainError):
            NoiseModel.tabulated(SpectralDensity(grid, [1.0, 0.0, 1.0]))

    def test_tabulated_noise_must_share_the_grid(self):
        noise = NoiseModel.tabulated(SpectralDensity(WavenumberGrid.linspace(-1, 1, 3), np.ones(3)))
        with self.assertRaises(ShapeError):
            noise.on_grid(WavenumberGrid.linspace(-2, 2, 3))


class TestEquivalentNoise(SimpleTestCase):

    def setUp(self):
        self.grid = WavenumberGrid.linspace(-2.0, 2.0, 41)

    def test_constant_gain(self):
        result = equivalent_noise(NoiseModel.white(3.0), flat_transfer(self.grid, 0.5j))
        np.testing.assert_allclose(result.values, 3.0 / (2 * math.pi * 0.25), rtol=1e-15)

    def test_linear_in_noise(self):
        g = SpectralDensity(self.grid, np.exp(-self.grid.samples ** 2) + 0j, kind='transfer')
        once = equivalent_noise(NoiseModel.white(1.5), g)
        twice = equivalent_noise(NoiseModel.white(3.0), g)
        np.testing.assert_allclose(twice.values, 2 * once.values, rtol=1e-15)

    def test_dead_bins_are_excluded(self):
        values = np.ones(self.grid.count, dtype=complex)
        values[:5] = 0.0
        result = equivalent_noise(NoiseModel.white(1.0), SpectralDensity(self.grid, values, kind='transfer'))
        self.assertTrue(np.all(np.isinf(result.values[:5])))
        self.assertTrue(np.all(np.isfinite(result.values[5:])))

    def test_noise_minimal_where_gain_peaks(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        noise_eq = equivalent_noise(NoiseModel.white(90.0), green_spectrum(scene))
        kappa = noise_eq.kappa[np.argmin(noise_eq.values)]
        self.assertLess(abs(kappa), scene.wavenumber)


class TestWaterLevel(SimpleTestCase):

    def test_two_modes(self):
        self.assertAlmostEqual(water_level([1.0, 4.0], [1.0, 1.0], 1.0), 2.0, places=13)

    def test_infinite_floor_gets_nothing(self):
        level = water_level([1.0, np.inf, 1.0], [1.0, 1.0, 1.0], 2.0)
        self.assertAlmostEqual(level, 2.0, places=13)

    def test_invalid_budget(self):
        with self.assertRaises(DomainError):
            water_level([1.0], [1.0], 0.0)
        with self.assertRaises(DomainError):
            water_level([np.inf], [1.0], 1.0)


class TestWaterfillSsd(SimpleTestCase):

    def test_flat_noise(self):
        half_width, c, power = 2.0, 0.7, 3.0
        grid = WavenumberGrid.linspace(-half_width, half_width, 201)
        result = waterfill_ssd(SpectralDensity(grid, np.full(201, c)), power)
        np.testing.assert_allclose(result.s_j.values, power / (2 * half_width), rtol=1e-12)
        expected = half_width / math.pi * math.log1p(power / (2 * half_width * c))
        self.assertAlmostEqual(result.capacity, expected, places=12)
        self.assertAlmostEqual(result.lagrange, 1 / (2 * math.pi * result.water_level), places=15)

    def test_two_level_noise(self):
        a, b, power = 1.0, 2.0, 3.0
        grid = WavenumberGrid.linspace(0.0, 1.0, 101)
        floors = np.where(np.arange(101) % 2 == 0, a, b)
        result = waterfill_ssd(SpectralDensity(grid, floors), power)
        self.assertAlmostEqual(result.water_level, power / (2 * 0.5) + (a + b) / 2, places=12)

    def test_invalid_power(self):
        grid = WavenumberGrid.linspace(-1, 1, 11)
        with self.assertRaises(DomainError):
            waterfill_ssd(SpectralDensity(grid, np.ones(11)), -1.0)

    def test_monotone_in_power_and_noise(self):
        grid = WavenumberGrid.linspace(-3, 3, 301)
        noise = SpectralDensity(grid, 1 + grid.samples ** 2)
        capacities = [waterfill_ssd(noise, p).capacity for p in (0.5, 1.0, 2.0, 4.0)]
        self.assertTrue(all(a <= b for a, b in zip(capacities, capacities[1:])))
        louder = SpectralDensity(grid, 1.5 * noise.values)
        self.assertLessEqual(waterfill_ssd(louder, 2.0).capacity, waterfill_ssd(noise, 2.0).capacity)

    def test_zero_allocation_has_no_capacity(self):
        grid = WavenumberGrid.linspace(-1, 1, 11)
        self.assertEqual(capacity_ssd(SpectralDensity(grid, np.zeros(11)), SpectralDensity(grid, np.ones(11))), 0.0)

    def test_capacity_is_scale_invariant(self):
        grid = WavenumberGrid.linspace(-1, 1, 21)
        s_j = SpectralDensity(grid, np.linspace(0.0, 2.0, 21))
        noise = SpectralDensity(grid, np.linspace(0.5, 1.5, 21))
        self.assertAlmostEqual(
            capacity_ssd(s_j.scaled(7.0), noise.scaled(7.0)), capacity_ssd(s_j, noise), places=13
        )


class TestLineLinkAllocation(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scene = PhysicalScene(wavelength=5.0, distance=1.0)
        cls.noise_eq = equivalent_noise(NoiseModel.white(90.0), green_spectrum(cls.scene))
        cls.result = waterfill_ssd(cls.noise_eq, 3.0)

    def test_power_and_kkt_certificate(self):
        result = self.result
        self.assertLessEqual(abs(result.allocated_power - 3.0), 1e-8 * 3.0)
        self.assertLessEqual(result.kkt_residual(), 1e-8)
        off = ~result.support
        self.assertTrue(np.all(result.noise_eq.values[off] >= result.water_level * (1 - 1e-8)))

    def test_support_around_main_lobe(self):
        kappa = self.result.s_j.kappa[self.result.support]
        self.assertGreater(kappa.size, 0)
        self.assertLess(np.max(np.abs(kappa)), 4 * self.scene.wavenumber)

    def test_random_reallocations_never_win(self):
        rng = np.random.default_rng(20240)
        grid = self.result.s_j.grid
        best = self.result.capacity
        for _ in range(100):
            other = rng.random(grid.count)
            other *= 3.0 / SpectralDensity(grid, other).integral()
            t = rng.random()
            mix = SpectralDensity(grid, (1 - t) * self.result.s_j.values + t * other)
            self.assertLessEqual(capacity_ssd(mix, self.noise_eq), best + 1e-10)


class TestKktCovarianceAllocate(SimpleTestCase):

    def test_isotropic_noise(self):
        sigma2, p0, n, m = 0.5, 2.0, 4, 6
        k_e, nats = kkt_covariance_allocate(sigma2 * np.eye(m), p0, n)
        np.testing.assert_allclose(np.diag(k_e).real, n * p0 / m, rtol=1e-12)
        self.assertAlmostEqual(nats, m * math.log1p(n * p0 / (m * sigma2)), places=12)

    def test_hand_waterfilling(self):
        k_e, nats = kkt_covariance_allocate(np.diag([1.0, 4.0]), 1.0, 1)
        np.testing.assert_allclose(k_e, np.diag([1.0, 0.0]), atol=1e-12)
        self.assertAlmostEqual(nats, math.log(2), places=12)

    def test_signal_covariance_is_psd_with_full_trace(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        k_n = a @ a.conj().T + 0.1 * np.eye(8)
        k_e, _ = kkt_covariance_allocate(k_n, 0.75, 8)
        np.testing.assert_allclose(k_e, k_e.conj().T, atol=1e-12)
        self.assertGreaterEqual(np.linalg.eigvalsh(k_e).min(), -1e-10)
        self.assertLessEqual(abs(np.trace(k_e).real - 6.0), 1e-8 * 6.0)

    def test_monotone_in_power(self):
        k_n = scipy_linalg.toeplitz(0.6 ** np.arange(10))
        values = [kkt_covariance_allocate(k_n, p, 10)[1] for p in (0.1, 0.5, 1.0, 3.0)]
        self.assertTrue(all(a <= b for a, b in zip(values, values[1:])))

    def test_singular_noise(self):
        with self.assertRaises(DomainError):
            kkt_covariance_allocate(np.diag([1.0, 0.0]), 1.0, 2)

    def test_toeplitz_noise_approaches_spectral_waterfilling(self):
        rho, n, p0 = 0.5, 256, 1.0
        k_n = scipy_linalg.toeplitz(rho ** np.arange(n))
        _, nats = kkt_covariance_allocate(k_n, p0, n)

        grid = WavenumberGrid.linspace(-math.pi, math.pi, 4001)
        omega = grid.samples
        noise = SpectralDensity(grid, (1 - rho ** 2) / (1 - 2 * rho * np.cos(omega) + rho ** 2))
        per_sample = waterfill_ssd(noise, 2 * math.pi * p0).capacity
        self.assertLess(abs(nats / n - per_sample), 0.05 * per_sample)
