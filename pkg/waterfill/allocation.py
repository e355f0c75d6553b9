"""
Water-filling over spectral bins and over noise eigenvalues.

Both allocations share ``water_level``: pour ``budget`` over floors
n_i with weights w_i so that sum w_i (level - n_i)^+ = budget.
"""
import logging
import math

import numpy as np
from django.conf import settings

from numerics.exceptions import DomainError
from numerics.linalg import eigh, hermitian_part
from spectrum.models import SpectralDensity

from .models import WaterfillResult

logger = logging.getLogger(__name__)

# Bins where |G| falls below this fraction of its peak carry no signal
DEAD_BIN_RATIO = 1e-14


def _poured(level, floors, weights):
    return float(np.sum(weights * np.clip(level - floors, 0.0, None)))


def water_level(floors, weights, budget, max_iter=None):
    """
    Level such that the weighted water above ``floors`` equals ``budget``.

    Infinite floors never receive water. Bisection isolates the support,
    then the level is solved in closed form on it, dropping or adding
    bins until the support is consistent with the level.
    """
    max_iter = max_iter or settings.EMCAP_WATERFILL_MAX_ITER
    floors = np.asarray(floors, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not math.isfinite(budget) or budget <= 0:
        raise DomainError(f'power budget must be positive, got {budget}')
    usable = np.isfinite(floors)
    if not np.any(usable):
        raise DomainError('every bin is excluded; there is nowhere to put power')
    floors, weights = floors[usable], weights[usable]
    if np.any(floors < 0) or np.any(weights <= 0):
        raise DomainError('floors must be non-negative and weights positive')

    lowest, highest = float(np.min(floors)), float(np.max(floors))
    lo, hi = lowest, highest + lowest + budget / float(np.sum(weights))
    for iteration in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _poured(mid, floors, weights) < budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    logger.debug('water level bracket [%.17g, %.17g] after %d iterations', lo, hi, iteration + 1)

    support = floors < hi
    for _ in range(floors.size + 1):
        level = (budget + float(np.sum(weights[support] * floors[support]))) / float(np.sum(weights[support]))
        settled = floors < level
        if np.array_equal(settled, support):
            break
        support = settled
    return level


def equivalent_noise(noise, g_spec):
    """S_N' = S_N / (2 pi |G|^2); bins where G is numerically zero are +inf."""
    noise_density = noise.on_grid(g_spec.grid).values
    gain = np.abs(g_spec.values) ** 2
    magnitude = np.sqrt(gain)
    alive = magnitude >= DEAD_BIN_RATIO * float(np.max(magnitude))
    values = np.full(gain.shape, np.inf)
    values[alive] = noise_density[alive] / (2 * math.pi * gain[alive])
    if not np.all(alive):
        logger.debug('%d of %d bins excluded from the support', int(np.sum(~alive)), alive.size)
    return SpectralDensity(g_spec.grid, values)


def capacity_ssd(s_j, noise_eq):
    """(1/2 pi) * integral of log(1 + S_J / S_N') in nats per meter."""
    s_j.require_same_grid(noise_eq)
    if np.any(noise_eq.values <= 0):
        raise DomainError('equivalent noise must be positive')
    ratio = np.divide(
        s_j.values, noise_eq.values, out=np.zeros_like(s_j.values), where=np.isfinite(noise_eq.values)
    )
    return float(SpectralDensity(s_j.grid, np.log1p(ratio)).integral()) / (2 * math.pi)


def waterfill_ssd(noise_eq, power, max_iter=None):
    """
    Capacity-achieving source SSD S_J = (w - S_N')^+ with integral P.

    The grid's trapezoid weights define the power integral, so the
    allocation is the exact optimum of the discretized problem.
    """
    if not math.isfinite(power) or power <= 0:
        raise DomainError(f'power must be positive, got {power}')
    floors = noise_eq.values
    if np.any(floors <= 0):
        raise DomainError('equivalent noise must be positive on the grid')

    level = water_level(floors, noise_eq.grid.trapezoid_weights(), power, max_iter)
    allocation = np.where(np.isfinite(floors), np.clip(level - floors, 0.0, None), 0.0)
    s_j = SpectralDensity(noise_eq.grid, allocation)
    capacity = capacity_ssd(s_j, noise_eq)
    logger.info('water level %.6g, capacity %.6g nats/m for power %g', level, capacity, power)
    return WaterfillResult(
        s_j=s_j,
        noise_eq=noise_eq,
        water_level=level,
        lagrange=1 / (2 * math.pi * level),
        capacity=capacity,
    )


def kkt_covariance_allocate(k_n, power_per_sample, n_samples):
    """
    Kuhn-Tucker allocation against a noise covariance.

    With K_N = Q diag(Lambda) Q^H the signal covariance is Q diag(A) Q^H,
    A_ii = (v - Lambda_ii)^+ and tr(A) = n * P0. Returns ``(k_e, nats)``.
    """
    if not math.isfinite(power_per_sample) or power_per_sample <= 0:
        raise DomainError(f'power per sample must be positive, got {power_per_sample}')
    if n_samples < 1:
        raise DomainError(f'need at least one sample, got {n_samples}')
    values, vectors = eigh(k_n)
    if values[-1] <= settings.EMCAP_PSD_TOLERANCE * max(float(values[0]), 0.0):
        raise DomainError(f'noise covariance is singular (smallest eigenvalue {values[-1]:.3g})')

    level = water_level(values, np.ones(values.size), n_samples * power_per_sample)
    allocation = np.clip(level - values, 0.0, None)
    k_e = hermitian_part((vectors * allocation) @ vectors.conj().T)
    nats = float(np.sum(np.log1p(allocation / values)))
    logger.debug('covariance water level %.6g on %d of %d modes', level, int(np.sum(allocation > 0)), values.size)
    return k_e, nats
