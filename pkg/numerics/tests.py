import math

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate as scipy_integrate

from .exceptions import AccuracyError, BracketError, DomainError, ShapeError
from .linalg import as_hermitian, clip_psd, eigh, eigvalsh_desc, logdet_hpd
from .models import Interval
from .quadrature import integrate, integrate_with_error
from .roots import find_root
from .special import bessel_j0, bessel_j1, bessel_k0, bessel_k1, bessel_y0, bessel_y1

EULER_GAMMA = 0.5772156649015329


def j0_series(x, terms=40):
    return sum((-1) ** k * (x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


def k0_integral(x):
    upper = math.acosh(60.0 / x)
    value, _ = scipy_integrate.quad(
        lambda t: math.exp(-x * math.cosh(t)), 0, upper, epsabs=1e-15, epsrel=1e-13, limit=200
    )
    return value


def k0_integral_on_unit_interval(terms=30):
    """Term-by-term integral of the K0 power series over (0, 1]."""
    total = 0.0
    harmonic = 0.0
    for k in range(terms):
        if k:
            harmonic += 1.0 / k
        c = 1.0 / (4 ** k * math.factorial(k) ** 2)
        p = 2 * k + 1
        total += c * (math.log(2) / p + 1 / p ** 2 - EULER_GAMMA / p + harmonic / p)
    return total


class TestInterval(SimpleTestCase):

    def test_rejects_empty_and_infinite_intervals(self):
        with self.assertRaises(DomainError):
            Interval(1.0, 1.0)
        with self.assertRaises(DomainError):
            Interval(0.0, math.inf)

    def test_midpoint_and_trapezoid_weights_sum_to_width(self):
        interval = Interval(-1.0, 3.0)
        nodes, weights = interval.midpoints(8)
        self.assertAlmostEqual(weights.sum(), 4.0)
        self.assertAlmostEqual(nodes[0], -0.75)
        nodes, weights = interval.trapezoid(9)
        self.assertAlmostEqual(weights.sum(), 4.0)
        self.assertEqual(nodes[-1], 3.0)


class TestBessel(SimpleTestCase):

    def test_j0_at_origin(self):
        self.assertEqual(bessel_j0(0.0), 1.0)

    def test_j0_first_zero(self):
        self.assertLess(abs(bessel_j0(2.4048255577)), 1e-8)

    def test_j0_matches_power_series(self):
        self.assertAlmostEqual(bessel_j0(1.0), 0.7651976866, places=10)
        for x in (0.5, 1.0, 3.0, 7.5):
            expected = j0_series(x)
            self.assertLess(abs(bessel_j0(x) - expected), 1e-10 * max(1.0, abs(expected)))

    def test_k0_matches_integral_representation(self):
        self.assertAlmostEqual(bessel_k0(1.0), 0.4210244382, places=10)
        for x in (0.05, 0.3, 2.0, 9.0):
            expected = k0_integral(x)
            self.assertLess(abs(bessel_k0(x) - expected), 1e-10 * expected)

    def test_y0_first_zero(self):
        self.assertLess(abs(bessel_y0(0.8935769663)), 1e-9)

    def test_y0_diverges_at_origin(self):
        self.assertLess(bessel_y0(1e-8), -10.0)

    def test_k0_and_k1_positive_and_decreasing(self):
        x = np.linspace(0.05, 50.0, 400)
        for fn in (bessel_k0, bessel_k1):
            values = fn(x)
            self.assertTrue(np.all(values > 0))
            self.assertTrue(np.all(np.diff(values) < 0))

    def test_k1_vanishes_at_large_argument(self):
        self.assertLess(bessel_k1(200.0), 1e-80)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            bessel_j0(math.nan)
        with self.assertRaises(DomainError):
            bessel_y0(0.0)
        with self.assertRaises(DomainError):
            bessel_k0(-1.0)
        with self.assertRaises(DomainError):
            bessel_k1(np.array([1.0, 0.0]))

    def test_vectorized_shape(self):
        x = np.array([[0.5, 1.0], [2.0, 4.0]])
        self.assertEqual(bessel_j0(x).shape, (2, 2))
        self.assertIsInstance(bessel_k0(1.0), float)

    def test_wronskian(self):
        h = 1e-5
        for x in np.linspace(0.1, 50.0, 60):
            dj0 = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h)
            dy0 = (bessel_y0(x + h) - bessel_y0(x - h)) / (2 * h)
            wronskian = dj0 * bessel_y0(x) - bessel_j0(x) * dy0
            self.assertLess(abs(wronskian - 2 / (math.pi * x)), 1e-6)
            exact = bessel_j0(x) * bessel_y1(x) - bessel_j1(x) * bessel_y0(x)
            self.assertLess(abs(exact - 2 / (math.pi * x)), 1e-12)

    def test_k1_is_minus_k0_derivative(self):
        h = 1e-5
        for x in np.linspace(0.5, 10.0, 40):
            dk0 = (bessel_k0(x + h) - bessel_k0(x - h)) / (2 * h)
            self.assertLess(abs(bessel_k1(x) + dk0), 1e-6)


class TestIntegrate(SimpleTestCase):

    def test_constant(self):
        self.assertAlmostEqual(integrate(lambda x: 1.0, Interval(0, 1), 1e-12), 1.0, places=12)

    def test_gaussian(self):
        value = integrate(lambda x: math.exp(-x * x), Interval(-8, 8), 1e-12)
        self.assertLess(abs(value - math.sqrt(math.pi)), 1e-10)

    def test_k0_log_singularity(self):
        value = integrate(bessel_k0, Interval(0, 1), 1e-10)
        self.assertLess(abs(value - k0_integral_on_unit_interval()), 1e-8)

    def test_complex_integrand(self):
        value = integrate(lambda x: np.exp(1j * x), Interval(0, math.pi), 1e-12)
        self.assertAlmostEqual(value.real, 0.0, places=10)
        self.assertAlmostEqual(value.imag, 2.0, places=10)

    def test_vector_integrand_and_points(self):
        value = integrate(lambda x: np.array([abs(x - 0.3), 1.0]), Interval(0, 1), 1e-12, points=(0.3,))
        self.assertAlmostEqual(value[0], 0.5 * (0.3 ** 2 + 0.7 ** 2), places=10)
        self.assertAlmostEqual(value[1], 1.0, places=12)

    def test_linearity(self):
        tol = 1e-10
        domain = Interval(0.0, 2.0)
        f = lambda x: math.sin(3 * x)
        g = lambda x: math.exp(-x) * x
        combined = integrate(lambda x: 2.5 * f(x) - 0.75 * g(x), domain, tol)
        separate = 2.5 * integrate(f, domain, tol) - 0.75 * integrate(g, domain, tol)
        self.assertLessEqual(abs(combined - separate), 2 * tol * 3.25)

    def test_deterministic(self):
        domain = Interval(0.0, 5.0)
        first = integrate_with_error(bessel_j0, domain, 1e-11)
        second = integrate_with_error(bessel_j0, domain, 1e-11)
        self.assertEqual(first, second)

    def test_non_convergence_carries_estimate(self):
        with self.assertRaises(AccuracyError) as raised:
            integrate(lambda x: math.cos(200 * x), Interval(0, 10), 1e-14, limit=2)
        self.assertIsNotNone(raised.exception.estimate)
        self.assertIsNotNone(raised.exception.error)


class TestFindRoot(SimpleTestCase):

    def test_linear(self):
        self.assertAlmostEqual(find_root(lambda x: x - 1, Interval(0, 2)), 1.0, places=11)

    def test_mode_equation(self):
        f = lambda x: 2 * math.atan(x) + x - math.pi
        lo, hi = 0.0, math.pi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                hi = mid
            else:
                lo = mid
        root = find_root(f, Interval(0, math.pi))
        self.assertAlmostEqual(root, 0.5 * (lo + hi), places=11)
        self.assertAlmostEqual(root, 1.3065, places=4)

    def test_cosine(self):
        self.assertAlmostEqual(find_root(math.cos, Interval(1, 2)), math.pi / 2, places=11)

    def test_no_sign_change(self):
        with self.assertRaises(BracketError):
            find_root(lambda x: x * x + 1, Interval(-1, 1))


class TestEigh(SimpleTestCase):

    def random_hermitian(self, size, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        return a + a.conj().T

    def test_identity(self):
        values, vectors = eigh(np.eye(3))
        np.testing.assert_allclose(values, [1, 1, 1])
        np.testing.assert_allclose(vectors, np.eye(3), atol=1e-12)

    def test_diagonal_sorted_descending(self):
        values, vectors = eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(values, [3, 2, 1])
        np.testing.assert_allclose(vectors, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-12)

    def test_random_reconstruction(self):
        m = self.random_hermitian(8, seed=3)
        values, vectors = eigh(m)
        residual = np.linalg.norm(vectors @ np.diag(values) @ vectors.conj().T - m)
        self.assertLessEqual(residual, 1e-8 * np.linalg.norm(m))
        np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(8), atol=1e-10)
        self.assertTrue(np.all(np.diff(values) <= 0))

    def test_degenerate_block_is_deterministic(self):
        q, _ = np.linalg.qr(self.random_hermitian(5, seed=9))
        m = q @ np.diag([4.0, 4.0, 4.0, 1.0, 0.5]) @ q.conj().T
        first = eigh(m)[1]
        second = eigh(m.copy())[1]
        np.testing.assert_array_equal(first, second)
        np.testing.assert_allclose(first.conj().T @ first, np.eye(5), atol=1e-10)

    def test_psd_spectrum_floor(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((10, 4))
        values = eigvalsh_desc(a @ a.T)
        self.assertTrue(np.all(values >= -1e-10 * values[0]))

    def test_rejects_non_hermitian(self):
        with self.assertRaises(DomainError):
            eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with self.assertRaises(ShapeError):
            as_hermitian(np.ones((2, 3)))

    def test_clip_psd_and_logdet(self):
        m = np.diag([2.0, 1.0, -1e-15])
        clipped = clip_psd(m)
        self.assertGreaterEqual(np.linalg.eigvalsh(clipped).min(), 0.0)
        self.assertAlmostEqual(logdet_hpd(np.diag([2.0, 3.0])), math.log(6.0), places=12)
        with self.assertRaises(DomainError):
            logdet_hpd(np.diag([1.0, -1.0]))
