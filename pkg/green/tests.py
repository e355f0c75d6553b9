import cmath
import math

import numpy as np
from django.test import SimpleTestCase

from numerics.exceptions import DomainError, SingularityError

from .kernels import dyadic_green, near_field_terms, scalar_kernel
from .models import FREE_SPACE_IMPEDANCE, PhysicalScene


def exact_dyadic_xx(scene, p):
    """xx-element of the full dyadic Green function, second derivatives included."""
    r = math.sqrt(sum(c * c for c in p))
    kr = scene.wavenumber * r
    unit_x = p[0] / r
    scale = -1j * scene.wavenumber * FREE_SPACE_IMPEDANCE / (4 * math.pi) * cmath.exp(1j * kr) / r
    transverse = 1 + 1j / kr - 1 / kr ** 2
    longitudinal = 1 + 3j / kr - 3 / kr ** 2
    return scale * (transverse - longitudinal * unit_x ** 2)


class TestPhysicalScene(SimpleTestCase):

    def test_derived_constants(self):
        scene = PhysicalScene(wavelength=5.0, distance=1.0)
        self.assertAlmostEqual(scene.wavenumber * scene.wavelength, 2 * math.pi, places=14)
        self.assertAlmostEqual(scene.impedance, 376.99111843077515, places=10)

    def test_invalid_scene(self):
        with self.assertRaises(DomainError):
            PhysicalScene(wavelength=0.0, distance=1.0)
        with self.assertRaises(DomainError):
            PhysicalScene(wavelength=1.0, distance=-2.0)
        with self.assertRaises(DomainError):
            PhysicalScene(wavelength=math.nan, distance=1.0)


class TestScalarKernel(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=5.0, distance=1.0)

    def test_value_at_zero_offset(self):
        scene = self.scene
        kd = scene.wavenumber * scene.distance
        expected = (-1j * FREE_SPACE_IMPEDANCE / (2 * scene.wavelength * scene.distance)
                    * cmath.exp(1j * kd) * (1 + 1j / kd - 1 / kd ** 2))
        self.assertAlmostEqual(scalar_kernel(scene, 0.0), expected, places=10)

    def test_even_in_offset(self):
        for x in (0.3, 1.7, 9.2):
            self.assertEqual(scalar_kernel(self.scene, x), scalar_kernel(self.scene, -x))

    def test_matches_exact_dyadic_element(self):
        value = scalar_kernel(self.scene, 2.0)
        expected = exact_dyadic_xx(self.scene, (2.0, 1.0, 0.0))
        self.assertLess(abs(value - expected), 1e-12 * abs(expected))

    def test_far_field_form_differs_by_near_field_terms(self):
        for x in (0.0, 2.0, 7.0):
            p = np.array([x, self.scene.distance, 0.0])
            far = dyadic_green(self.scene, p).matrix[0, 0]
            difference = scalar_kernel(self.scene, x) - far
            self.assertLess(abs(difference - near_field_terms(self.scene, x)), 1e-12 * abs(far))

    def test_vectorized(self):
        x = np.linspace(-3, 3, 7)
        values = scalar_kernel(self.scene, x)
        self.assertEqual(values.shape, (7,))
        self.assertAlmostEqual(values[2], scalar_kernel(self.scene, x[2]), places=12)

    def test_rejects_non_finite_offset(self):
        with self.assertRaises(DomainError):
            scalar_kernel(self.scene, math.inf)

    def test_far_field_magnitude_decreasing(self):
        x = np.logspace(math.log10(10 * self.scene.distance), 4, 300)
        magnitude = np.abs(scalar_kernel(self.scene, x))
        self.assertTrue(np.all(np.diff(magnitude) < 0))

    def test_phase_has_no_branch_jumps(self):
        x = np.linspace(-60, 60, 24001)
        r = np.hypot(x, self.scene.distance)
        reduced = scalar_kernel(self.scene, x) * np.exp(-1j * self.scene.wavenumber * r)
        self.assertGreater(np.min(np.abs(reduced)), 0.0)
        phase = np.unwrap(np.angle(reduced))
        self.assertLess(np.max(np.abs(np.diff(phase))), 0.1)


class TestDyadicGreen(SimpleTestCase):

    def setUp(self):
        self.scene = PhysicalScene(wavelength=5.0, distance=1.0)

    def test_longitudinal_component_removed(self):
        matrix = dyadic_green(self.scene, [0.0, 0.0, 3.0]).matrix
        self.assertAlmostEqual(abs(matrix[2, 2]), 0.0, places=14)
        self.assertAlmostEqual(matrix[0, 0], matrix[1, 1], places=14)
        self.assertAlmostEqual(abs(matrix[0, 1]), 0.0, places=14)

    def test_broadside_entry_matches_scalar_leading_term(self):
        d = self.scene.distance
        matrix = dyadic_green(self.scene, [0.0, d, 0.0]).matrix
        leading = (-1j * FREE_SPACE_IMPEDANCE * cmath.exp(1j * self.scene.wavenumber * d)
                   / (2 * self.scene.wavelength * d))
        self.assertLess(abs(matrix[0, 0] - leading), 1e-12 * abs(leading))

    def test_inverse_distance_scaling(self):
        p = np.array([0.4, -1.3, 2.2])
        ratio = np.linalg.norm(dyadic_green(self.scene, 2 * p).matrix) / np.linalg.norm(dyadic_green(self.scene, p).matrix)
        self.assertAlmostEqual(ratio, 0.5, places=12)

    def test_projector_is_idempotent(self):
        p = np.array([1.0, 2.0, -0.5])
        sample = dyadic_green(self.scene, p)
        projector = sample.projector
        np.testing.assert_allclose(projector @ projector, projector, atol=1e-12)
        np.testing.assert_allclose(projector @ (p / np.linalg.norm(p)), np.zeros(3), atol=1e-12)

    def test_zero_separation(self):
        with self.assertRaises(SingularityError):
            dyadic_green(self.scene, [0.0, 0.0, 0.0])
