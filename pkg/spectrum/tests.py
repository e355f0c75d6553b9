import cmath
import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from scipy import integrate as scipy_integrate

from green.kernels import scalar_kernel
from green.models import FREE_SPACE_IMPEDANCE, PhysicalScene
from numerics.exceptions import BranchPointError, DomainError, GridError, ShapeError, SingularityError

from .models import SpectralDensity, WavenumberGrid
from .summary import side_lobe_ratio, spectral_energy
from .transforms import (
    f1_closed, f2_closed, green_spectrum, log_cell_defect, numerical_ft_oracle,
)


def spherical_wave(scene):
    def f1(x):
        r = math.hypot(x, scene.distance)
        return -1j * FREE_SPACE_IMPEDANCE * cmath.exp(1j * scene.wavenumber * r) / (2 * scene.wavelength * r)
    return f1


def bracket(scene):
    def f2(x):
        d = scene.distance
        r2 = x * x + d * d
        kr = scene.wavenumber * math.sqrt(r2)
        cross = (d * d - 2 * x * x) / r2
        return d * d / r2 + 1j * cross / kr - cross / kr ** 2
    return f2


def oracle_window(scene):
    half_width = settings.EMCAP_ORACLE_HALF_WIDTH * scene.wavelength
    taper = settings.EMCAP_ORACLE_TAPER * scene.wavelength
    steps = int(half_width / scene.wavelength)
    points = [k * scene.wavelength for k in range(-steps + 1, steps)]
    return half_width, taper, points


class TestWavenumberGrid(SimpleTestCase):

    def test_symmetric_grid_keeps_branch_point_off_both_lattices(self):
        k0 = 2 * math.pi / 5
        grid = WavenumberGrid.symmetric(8 * k0, 512, avoid=k0)
        cells = k0 / grid.spacing
        self.assertAlmostEqual(cells - math.floor(cells), 0.25, places=9)
        self.assertTrue(grid.is_symmetric)
        self.assertAlmostEqual(grid.samples[256], 0.5 * grid.spacing, places=14)
        self.assertGreaterEqual(grid.samples[-1], 8 * k0 - grid.spacing)

    def test_default_grid_covers_decay(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        grid = WavenumberGrid.for_scene(scene)
        self.assertEqual(grid.count, settings.EMCAP_SPECTRUM_SAMPLES)
        self.assertGreater(grid.samples[-1], scene.wavenumber + 23.0)

    def test_invalid_grids(self):
        with self.assertRaises(GridError):
            WavenumberGrid.symmetric(4.0, 11)
        with self.assertRaises(GridError):
            WavenumberGrid(np.array([0.0, 1.0, 1.5]))
        with self.assertRaises(GridError):
            WavenumberGrid(np.array([1.0, 0.0]))
        with self.assertRaises(GridError):
            WavenumberGrid.symmetric(1.0, 4, avoid=0.1)

    def test_trapezoid_weights(self):
        grid = WavenumberGrid.linspace(-1.0, 1.0, 11)
        self.assertAlmostEqual(grid.trapezoid_weights().sum(), 2.0, places=14)


class TestSpectralDensity(SimpleTestCase):

    def setUp(self):
        self.grid = WavenumberGrid.linspace(-1.0, 1.0, 5)

    def test_rejects_negative_density(self):
        with self.assertRaises(DomainError):
            SpectralDensity(self.grid, [1.0, 1.0, -0.1, 1.0, 1.0])

    def test_rejects_wrong_length(self):
        with self.assertRaises(ShapeError):
            SpectralDensity(self.grid, [1.0, 1.0])

    def test_integral_and_energy(self):
        density = SpectralDensity(self.grid, np.full(5, 3.0))
        self.assertAlmostEqual(density.integral(), 6.0, places=12)
        transfer = SpectralDensity(self.grid, np.full(5, 1j), kind='transfer')
        self.assertAlmostEqual(transfer.integral(), 2j, places=12)
        self.assertAlmostEqual(transfer.energy(), 2.0, places=12)

    def test_different_grids(self):
        other = SpectralDensity(WavenumberGrid.linspace(-2.0, 2.0, 5), np.ones(5))
        with self.assertRaises(ShapeError):
            SpectralDensity(self.grid, np.ones(5)).require_same_grid(other)


class TestClosedForms(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=5.0, distance=1.0)

    def test_even(self):
        for kappa in (0.3, 1.1, 2.0, 7.5):
            self.assertEqual(f1_closed(self.scene, kappa), f1_closed(self.scene, -kappa))
            self.assertEqual(f2_closed(self.scene, kappa), f2_closed(self.scene, -kappa))

    def test_f1_matches_numerical_transform(self):
        half_width, taper, points = oracle_window(self.scene)
        expected, _ = numerical_ft_oracle(
            spherical_wave(self.scene), 0.0, half_width, taper, points, abs_tol=1e-7, rel_tol=1e-9
        )
        value = f1_closed(self.scene, 0.0)
        self.assertLess(abs(value - expected), 1e-4 * abs(expected))

    def test_f2_matches_numerical_transform(self):
        half_width, taper, points = oracle_window(self.scene)
        expected, _ = numerical_ft_oracle(
            bracket(self.scene), 1.0, half_width, taper, points, abs_tol=1e-8, rel_tol=1e-9
        )
        value = f2_closed(self.scene, 1.0)
        self.assertLess(abs(value - expected), 1e-4 * abs(expected))

    def test_decay(self):
        self.assertLess(abs(f1_closed(self.scene, 40.0)), 1e-12 * abs(f1_closed(self.scene, 0.0)))
        near, far = abs(f2_closed(self.scene, 5.0)), abs(f2_closed(self.scene, 10.0))
        self.assertLess(far, near * math.exp(-4.0))

    def test_singular_points(self):
        with self.assertRaises(BranchPointError):
            f1_closed(self.scene, self.scene.wavenumber)
        with self.assertRaises(BranchPointError):
            f1_closed(self.scene, np.array([0.0, -self.scene.wavenumber]))
        with self.assertRaises(SingularityError):
            f2_closed(self.scene, 0.0)
        with self.assertRaises(DomainError):
            f1_closed(self.scene, math.nan)

    def test_vectorized(self):
        kappa = np.array([0.2, 0.9, 3.0])
        values = f2_closed(self.scene, kappa)
        self.assertEqual(values.shape, (3,))
        self.assertEqual(values[1], f2_closed(self.scene, 0.9))


class TestLogCellDefect(SimpleTestCase):

    def test_half_cell_value(self):
        self.assertAlmostEqual(log_cell_defect(0.5), -math.log(2), places=9)

    def test_even_and_periodic(self):
        self.assertAlmostEqual(log_cell_defect(0.25), log_cell_defect(0.75), places=11)
        self.assertAlmostEqual(log_cell_defect(0.25), log_cell_defect(3.25), places=11)

    def test_singularity_on_node(self):
        with self.assertRaises(GridError):
            log_cell_defect(2.0)


class TestNumericalOracle(SimpleTestCase):

    def test_gaussian_self_transform(self):
        kappa = np.array([0.0, 0.5, 1.5, 3.0])
        values, _ = numerical_ft_oracle(lambda x: math.exp(-x * x / 2), kappa, 20.0, 0.0)
        np.testing.assert_allclose(values, np.exp(-kappa ** 2 / 2), atol=1e-8)

    def test_indicator(self):
        value, error = numerical_ft_oracle(lambda x: 1.0 if abs(x) <= 1 else 0.0, 0.0, 5.0, 0.0, points=(-1.0, 1.0))
        self.assertAlmostEqual(value.real, 2 / math.sqrt(2 * math.pi), places=9)
        self.assertAlmostEqual(value.imag, 0.0, places=12)
        self.assertLess(error, 1e-8)

    def test_invalid_window(self):
        with self.assertRaises(DomainError):
            numerical_ft_oracle(lambda x: 1.0, 0.0, 10.0, 20.0)


class TestGreenSpectrum(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scene = PhysicalScene(wavelength=5.0, distance=1.0)
        cls.spectrum = green_spectrum(cls.scene)

    def test_matches_numerical_transform_of_kernel(self):
        grid = self.spectrum.grid
        centre = grid.count // 2
        picks = centre + 16 * np.arange(-16, 17)
        kappa = grid.samples[picks]
        half_width, taper, points = oracle_window(self.scene)
        expected, _ = numerical_ft_oracle(
            lambda x: scalar_kernel(self.scene, x), kappa, half_width, taper, points, abs_tol=1e-7, rel_tol=1e-9
        )
        error = np.sqrt(np.mean(np.abs(self.spectrum.values[picks] - expected) ** 2))
        scale = np.sqrt(np.mean(np.abs(expected) ** 2))
        self.assertLessEqual(error / scale, 1e-3)

    def test_agrees_with_oracle_near_half(self):
        grid = self.spectrum.grid
        i = int(np.argmin(np.abs(grid.samples - 0.5)))
        half_width, taper, points = oracle_window(self.scene)
        expected, _ = numerical_ft_oracle(
            lambda x: scalar_kernel(self.scene, x), grid.samples[i], half_width, taper, points,
            abs_tol=1e-7, rel_tol=1e-9,
        )
        self.assertLess(abs(self.spectrum.values[i] - expected), 1e-3 * abs(expected))

    def test_magnitude_is_even(self):
        magnitude = self.spectrum.magnitude
        self.assertLessEqual(np.max(np.abs(magnitude - magnitude[::-1])), 1e-10 * np.max(magnitude))

    def test_parseval(self):
        value, _ = scipy_integrate.quad(
            lambda x: abs(scalar_kernel(self.scene, x)) ** 2, 0, np.inf, limit=400
        )
        spatial = 2 * value
        self.assertLess(abs(spectral_energy(self.spectrum) - spatial), 0.01 * spatial)

    def test_main_lobe_inside_light_cone(self):
        kappa, magnitude = self.spectrum.kappa, self.spectrum.magnitude
        self.assertLess(abs(kappa[np.argmax(magnitude)]), self.scene.wavenumber)

    def test_side_lobes_with_wavelength(self):
        self.assertGreater(side_lobe_ratio(self.spectrum, self.scene), 0.05)
        short = PhysicalScene(wavelength=0.5, distance=1.0)
        self.assertLess(side_lobe_ratio(green_spectrum(short), short), 0.05)

    def test_distance_sweep(self):
        energies = []
        for distance in (0.5, 1.0, 5.0, 10.0):
            scene = PhysicalScene(wavelength=5.0, distance=distance)
            spectrum = green_spectrum(scene)
            energies.append(spectral_energy(spectrum))
            if distance >= 5.0:
                self.assertLess(side_lobe_ratio(spectrum, scene), 0.05)
        self.assertTrue(all(a > b for a, b in zip(energies, energies[1:])))

    def test_grid_too_narrow(self):
        k0 = self.scene.wavenumber
        with self.assertRaises(GridError):
            green_spectrum(self.scene, WavenumberGrid.symmetric(2 * k0, 64, avoid=k0))

    def test_grid_must_be_half_offset_and_symmetric(self):
        with self.assertRaises(GridError):
            green_spectrum(self.scene, WavenumberGrid.linspace(0.1, 30.0, 512))

    def test_branch_point_on_lattice(self):
        k0 = self.scene.wavenumber
        with self.assertRaises(GridError):
            green_spectrum(self.scene, WavenumberGrid.symmetric(8 * k0, 1024))
