"""
Wavenumber spectrum of the line-to-line Green kernel.

Fourier convention: F[f](kappa) = (1/sqrt(2 pi)) * integral f(x) e^{j kappa x} dx.
The kernel splits as g = f1 * f2 (pointwise), with f1 the spherical wave
-j Z0 e^{j kappa0 r} / (2 lambda r) and f2 the three-term bracket, so
G = (1/sqrt(2 pi)) * (F1 conv F2).
"""
import logging
import math

import numpy as np
from django.conf import settings

from numerics.exceptions import BranchPointError, DomainError, GridError, SingularityError
from numerics.models import Interval
from numerics.quadrature import integrate_with_error
from numerics.special import bessel_j0, bessel_k0, bessel_k1, bessel_y0

from .models import SpectralDensity, WavenumberGrid

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2 * math.pi)

# Cells summed exactly by log_cell_defect before the tail estimate
DEFECT_WINDOW = 10000


def _wavenumbers(kappa):
    values = np.asarray(kappa, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError('wavenumbers must be finite')
    return values


def _shaped(values, kappa):
    return complex(values) if kappa.ndim == 0 else values


def f1_prefactor(scene):
    """
    Constant in front of the Hankel/Macdonald factor of F1.

    The transform of e^{j kappa0 r}/r over the whole line is
    j pi H0(d m) inside the light cone and 2 K0(d m) outside, which
    makes the constant -j Z0 / (lambda sqrt(2 pi)).
    """
    return -1j * scene.impedance / (scene.wavelength * SQRT_2PI)


def f1_closed(scene, kappa):
    k = _wavenumbers(kappa)
    k0 = scene.wavenumber
    a = np.abs(k)
    if np.any(np.abs(a - k0) <= 1e-9 * k0):
        raise BranchPointError(f'F1 is singular at |kappa| = kappa0 = {k0:.12g}; offset the grid')
    dm = scene.distance * np.sqrt(np.abs(k0 * k0 - a * a))
    inside = a < k0
    value = np.empty(k.shape, dtype=complex)
    value[inside] = 0.5 * math.pi * (1j * bessel_j0(dm[inside]) - bessel_y0(dm[inside]))
    value[~inside] = bessel_k0(dm[~inside])
    return _shaped(f1_prefactor(scene) * value, k)


def f2_closed(scene, kappa):
    k = _wavenumbers(kappa)
    a = np.abs(k)
    if np.any(a == 0):
        raise SingularityError('F2 has a logarithmic singularity at kappa = 0')
    d, lam = scene.distance, scene.wavelength
    da = d * a
    decay = np.exp(-da)
    k0v, k1v = bessel_k0(da), bessel_k1(da)
    root_2_pi, root_pi_2 = math.sqrt(2 / math.pi), math.sqrt(math.pi / 2)
    near = (lam / (2 * math.pi)) ** 2

    value = (
        d * root_pi_2 * decay
        + 1j * d * lam / (2 * math.pi) * root_2_pi * a * k1v
        - 1j * lam / math.pi * (root_2_pi * k0v - d * root_2_pi * a * k1v)
        - near / (2 * d) * root_pi_2 * (1 + da) * decay
        + near * (root_pi_2 * 2 * decay / d - root_pi_2 / d * (1 + da) * decay)
    )
    return _shaped(value, k)


def _antiderivative(v):
    return v * np.log(np.where(v == 0, 1.0, np.abs(v))) - v


def log_cell_defect(t, window=DEFECT_WINDOW):
    """
    Sum over unit cells k of (integral of ln|u - t| over the cell) minus
    ln|k - t|: the rectangle-rule defect of a unit logarithmic singularity
    at t. Periodic and even in t.
    """
    t = t - math.floor(t)
    offsets = np.arange(-window, window + 1) - t
    v = np.abs(offsets)
    if np.min(v) < 1e-12:
        raise GridError('logarithmic singularity sits on a quadrature node')
    defect = np.empty_like(v)
    far = v > 0.5
    x = 0.5 / v[far]
    defect[far] = (v[far] + 0.5) * np.log1p(x) - (v[far] - 0.5) * np.log1p(-x) - 1.0
    near = offsets[~far]
    defect[~far] = _antiderivative(near + 0.5) - _antiderivative(near - 0.5) - np.log(np.abs(near))
    tail = -1.0 / (24 * (window + 0.5 - t)) - 1.0 / (24 * (window + 0.5 + t))
    return float(np.sum(defect) + tail)


def _check_edges(name, values, edge_values):
    peak = float(np.max(np.abs(values)))
    edge = float(np.max(np.abs(edge_values)))
    if edge >= settings.EMCAP_EDGE_TOLERANCE * peak:
        raise GridError(
            f'grid too narrow: |{name}| at the edge is {edge / peak:.2e} of its peak; widen the grid'
        )


def green_spectrum(scene, grid=None):
    """
    G(kappa) on a symmetric half-offset grid.

    F1 is sampled on the integer multiples of the spacing and F2 on the
    half-integer multiples, so neither is evaluated at a singularity.
    The rectangle-rule convolution is corrected in closed form for the
    logarithmic singularity of F2 at 0, the logarithmic singularities
    of F1 at +-kappa0 and the jump of F1 across +-kappa0.
    """
    grid = grid or WavenumberGrid.for_scene(scene)
    if not grid.is_symmetric or abs(grid.samples[grid.count // 2] - 0.5 * grid.spacing) > 1e-9 * grid.spacing:
        raise GridError('green_spectrum needs a symmetric grid with nodes at half-integer multiples of the spacing')

    h = grid.spacing
    count = grid.count
    half = count // 2
    k0 = scene.wavenumber
    cells = k0 / h
    fraction = cells - math.floor(cells)
    if min(fraction, 1 - fraction, abs(fraction - 0.5)) < 1e-3:
        raise GridError(f'grid spacing {h:.6g} puts a node on the branch point {k0:.6g}')

    f1 = f1_closed(scene, np.arange(-half, half + 1) * h)
    f2 = f2_closed(scene, (np.arange(-2 * half, 2 * half) + 0.5) * h)
    _check_edges('F1', f1, f1[[0, -1]])
    _check_edges('F2', f2, f2_closed(scene, grid.samples[[0, -1]]))

    raw = np.convolve(f1, f2)[2 * half:2 * half + count]

    nodes = grid.samples
    prefactor = f1_prefactor(scene)
    f2_shifted = f2_closed(scene, nodes - k0) + f2_closed(scene, nodes + k0)
    f2_log = 1j * scene.wavelength / math.pi * math.sqrt(2 / math.pi)
    correction = (
        f2_log * log_cell_defect(0.5) * f1_closed(scene, nodes)
        - 0.5 * prefactor * log_cell_defect(cells) * f2_shifted
        + prefactor * 0.5j * math.pi * (fraction - 0.5) * f2_shifted
    )
    values = (raw + correction) * h / SQRT_2PI
    logger.debug('green spectrum for %s on %d nodes, spacing %.4g', scene, count, h)
    return SpectralDensity(grid, values, kind='transfer')


def cosine_taper(x, half_width, taper):
    """1 on the flat part, a raised cosine over the last ``taper`` meters, 0 beyond."""
    x = np.abs(np.asarray(x, dtype=float))
    flat = half_width - taper
    if taper <= 0:
        return np.where(x <= half_width, 1.0, 0.0)
    ramp = 0.5 * (1 + np.cos(math.pi * np.clip(x - flat, 0, taper) / taper))
    return np.where(x <= flat, 1.0, np.where(x <= half_width, ramp, 0.0))


def numerical_ft_oracle(f, kappa, half_width, taper, points=(), abs_tol=1e-9, rel_tol=1e-10):
    """
    Brute-force (1/sqrt(2 pi)) * integral of f(x) e^{j kappa x} over
    [-half_width, half_width] with a raised-cosine taper.

    ``kappa`` may be a scalar or an array; all wavenumbers share one
    adaptive quadrature. Returns ``(value, error)``.
    """
    if half_width <= 0 or not 0 <= taper <= half_width:
        raise DomainError('need half_width > 0 and 0 <= taper <= half_width')
    k = _wavenumbers(kappa)
    flat_k = np.atleast_1d(k)

    def integrand(x):
        return f(x) * float(cosine_taper(x, half_width, taper)) * np.exp(1j * flat_k * x)

    flat = half_width - taper
    breaks = set(points) | {-flat, flat, 0.0}
    value, error = integrate_with_error(
        integrand, Interval(-half_width, half_width), abs_tol, rel_tol=rel_tol, points=breaks
    )
    value = np.asarray(value) / SQRT_2PI
    return (complex(value[0]) if k.ndim == 0 else value), error / SQRT_2PI
