"""
Mercer expansions of receive autocorrelations on a destination [0, L].

The exponential kernel P exp(-alpha |r - r'|) has the closed-form system

    lambda_k = 2 alpha P / (alpha^2 + omega_k^2)
    phi_k(r) = (omega_k cos(omega_k r) + alpha sin(omega_k r)) / Z_k
    2 arctan(omega_k / alpha) = k pi - omega_k L

Any other kernel goes through the Nystrom method.
"""
import logging
import math
import warnings

import numpy as np
from django.conf import settings
from scipy import optimize

from numerics.exceptions import DomainError, NotPositiveSemidefiniteError
from numerics.linalg import eigh
from numerics.models import Interval
from numerics.quadrature import integrate
from numerics.roots import find_root
from sampled.covariance import resolve_source_sampling
from sampled.models import SamplingLayout

from .models import MercerInformation, MercerSpectrum

logger = logging.getLogger(__name__)

# Largest residual of the mode equation accepted from the Newton pass
MODE_RESIDUAL = 1e-10


def mode_residual(params, omega, k):
    return 2 * np.arctan(omega / params.alpha) + omega * params.length - k * math.pi


def mode_count_for(params):
    """Modes below the frequency cutoff EMCAP_MERCER_CUTOFF * alpha."""
    return max(1, math.ceil(settings.EMCAP_MERCER_CUTOFF * params.alpha * params.length / math.pi))


def _mode_frequencies(params, k_max):
    alpha, length = params.alpha, params.length
    k = np.arange(1, k_max + 1)
    lower = (k - 1) * math.pi / length
    upper = k * math.pi / length

    def f(omega):
        return mode_residual(params, omega, k)

    def fprime(omega):
        return length + 2 * alpha / (alpha * alpha + omega * omega)

    # f is increasing and concave, so Newton from the left end never overshoots
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', RuntimeWarning)
        omega = optimize.newton(f, lower, fprime=fprime, tol=1e-14 * (1 + upper[-1]), maxiter=100, disp=False)
    omega = np.asarray(omega, dtype=float).reshape(k.shape)

    # k pi carries rounding of its own once k is large
    limit = np.maximum(MODE_RESIDUAL, 16 * np.finfo(float).eps * k * math.pi)
    bad = ~((omega > lower) & (omega < upper) & (np.abs(f(omega)) <= limit))
    for i in np.flatnonzero(bad):
        omega[i] = find_root(lambda w: mode_residual(params, w, k[i]), Interval(lower[i], upper[i]))
    if np.any(bad):
        logger.debug('%d of %d mode frequencies re-solved by bracketing', int(np.sum(bad)), k_max)
    return omega


def exp_kernel_normalization(params, omega):
    """Z_k: the L2 norm over [0, L] of omega cos(omega r) + alpha sin(omega r)."""
    alpha, length = params.alpha, params.length
    twice = 2 * omega * length
    squared = (
        0.5 * (omega ** 2 + alpha ** 2) * length
        + (omega ** 2 - alpha ** 2) * np.sin(twice) / (4 * omega)
        + 0.5 * alpha * (1 - np.cos(twice))
    )
    return np.sqrt(squared)


def exp_kernel_modes(params, k_max, samples=2048):
    """
    Closed-form modes k = 1..k_max of the exponential kernel.

    Eigenfunctions are sampled on ``samples`` trapezoid nodes of [0, L];
    ``samples=0`` skips them (long spectra only need eigenvalues).
    """
    if k_max < 1:
        raise DomainError(f'k_max must be at least 1, got {k_max}')
    omega = _mode_frequencies(params, k_max)
    eigenvalues = 2 * params.alpha * params.power / (params.alpha ** 2 + omega ** 2)
    norms = exp_kernel_normalization(params, omega)

    nodes = weights = phi = None
    if samples:
        nodes, weights = Interval(0.0, params.length).trapezoid(samples)
        phase = nodes[:, None] * omega[None, :]
        phi = (omega * np.cos(phase) + params.alpha * np.sin(phase)) / norms
    return MercerSpectrum(
        eigenvalues=eigenvalues,
        length=params.length,
        trace=params.trace,
        frequencies=omega,
        normalizations=norms,
        nodes=nodes,
        weights=weights,
        eigenfunctions=phi,
    )


def nystrom_from_matrix(matrix, nodes, weights, k_max, length):
    """
    Nystrom modes of a kernel already evaluated on the quadrature nodes.

    The symmetrized matrix W^1/2 R W^1/2 is diagonalized; eigenvectors are
    unscaled by W^1/2 into eigenfunction samples, and real eigenfunctions
    are signed to rise at r = 0.
    """
    root = np.sqrt(weights)
    values, vectors = eigh(root[:, None] * matrix * root[None, :])
    if values.size and values[-1] < -settings.EMCAP_PSD_TOLERANCE * max(float(values[0]), 0.0):
        raise NotPositiveSemidefiniteError(f'kernel has eigenvalue {values[-1]:.3g} against {values[0]:.3g}')

    trace = float(np.sum(weights * np.real(np.diag(matrix))))
    keep = min(k_max, values.size)
    phi = vectors[:, :keep] / root[:, None]
    if not np.iscomplexobj(matrix) and phi.shape[0] > 1:
        phi = np.real(phi) * np.where(phi[1].real < phi[0].real, -1.0, 1.0)
    return MercerSpectrum(
        eigenvalues=np.clip(values[:keep], 0.0, None),
        length=length,
        trace=trace,
        nodes=nodes,
        weights=weights,
        eigenfunctions=phi,
    )


def nystrom_modes(r_e, length, n, k_max):
    """Top ``k_max`` modes of the kernel ``r_e(r, r')`` on an n-point trapezoid grid."""
    if k_max < 1 or n < 4 * k_max:
        raise DomainError(f'need n >= 4 k_max (n={n}, k_max={k_max})')
    nodes, weights = Interval(0.0, length).trapezoid(n)
    matrix = np.asarray(r_e(nodes[:, None], nodes[None, :])) * np.ones((n, n))
    return nystrom_from_matrix(matrix, nodes, weights, k_max, length)


def receive_kernel_modes(scene, r_j, length, n, k_max, source_count, dest_start=0.0):
    """
    Mercer spectrum of the field received on [dest_start, dest_start + L]
    from a source with autocorrelation ``r_j``. The source sampling starts
    at ``source_count`` points and is refined until K_E is resolved.
    """
    if n < 4 * k_max:
        raise DomainError(f'need n >= 4 k_max (n={n}, k_max={k_max})')
    dest = Interval(dest_start, dest_start + length)
    layout = SamplingLayout.for_lines(scene, r_j.support, source_count, dest, n)
    layout, k_e = resolve_source_sampling(scene, layout, r_j)
    return nystrom_from_matrix(k_e, layout.dest_points - dest_start, layout.dest_weights, k_max, length)


def mercer_mutual_information(spectrum, n0):
    """
    Sum of log(1 + 2 lambda_k / n0) over modes above the eigenvalue floor.

    Since log(1 + x) <= x, the modes left out add at most 2 (trace - kept) / n0.
    """
    if not math.isfinite(n0) or n0 <= 0:
        raise DomainError(f'n0 must be positive, got {n0}')
    values = spectrum.eigenvalues
    if not values.size or values[0] == 0:
        return MercerInformation(nats=0.0, tail_bound=2 * max(spectrum.trace, 0.0) / n0, modes=0)
    kept = values[values >= settings.EMCAP_MERCER_EIGEN_FLOOR * values[0]]
    nats = float(np.sum(np.log1p(2 * kept / n0)))
    remainder = max(spectrum.trace - float(np.sum(kept)), 0.0)
    return MercerInformation(nats=nats, tail_bound=2 * remainder / n0, modes=kept.size)


def nystrom_grid_for(params):
    return max(256, math.ceil(64 * params.alpha * params.length))


def information_curve(params, lengths, n0, method='closed', grid=None):
    """
    I(L) for each destination length; returns (L, MercerInformation) pairs.

    The Nystrom method keeps every eigenvalue of its grid: together they
    carry the whole trace, which the tail of a truncated set would miss.
    """
    if method not in ('closed', 'nystrom'):
        raise DomainError(f'unknown method {method!r}')
    curve = []
    for length in lengths:
        p = params.with_length(length)
        if method == 'closed':
            spectrum = exp_kernel_modes(p, mode_count_for(p), samples=0)
        else:
            n = grid or nystrom_grid_for(p)
            nodes, weights = Interval(0.0, length).trapezoid(n)
            matrix = p.kernel(nodes[:, None], nodes[None, :])
            spectrum = nystrom_from_matrix(matrix, nodes, weights, n, length)
        information = mercer_mutual_information(spectrum, n0)
        logger.debug('L=%g: %.6g nats over %d modes', length, information.nats, information.modes)
        curve.append((float(length), information))
    return curve


def ssd_capacity(params, n0):
    """
    (1/2 pi) * integral of log(1 + S_E / S_N) for the exponential kernel's
    SSD against white noise of PSD n0 / (2 sqrt(2 pi)); kappa = alpha tan(theta).
    """
    alpha = params.alpha
    snr = 4 * alpha * params.power / n0

    def integrand(theta):
        c = math.cos(theta)
        return math.log1p(snr * c * c / alpha ** 2) * alpha / (c * c)

    half = 0.5 * math.pi
    return integrate(integrand, Interval(-half, half), 1e-12, rel_tol=1e-12) / (2 * math.pi)


def mercer_vs_ssd_limit(params, n0, length=None):
    """
    I(L)/L of the closed-form expansion at L = 32/alpha (or ``length``)
    next to the infinite-line SSD capacity it tends to.
    """
    if not math.isfinite(n0) or n0 <= 0:
        raise DomainError(f'n0 must be positive, got {n0}')
    p = params.with_length(length or 32 / params.alpha)
    information = mercer_mutual_information(exp_kernel_modes(p, mode_count_for(p), samples=0), n0)
    return information.nats / p.length, ssd_capacity(params, n0)
