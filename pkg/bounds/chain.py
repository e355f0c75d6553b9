"""
Numerical checks of the capacity bound chain between line sources.

For a source of length L the chain is

    I(L source, L destination) <= I(L source, 2L destination)
                               <= I(stationarized source, 2L destination)

where the stationarized source repeats independent copies of the source
with period L and averages over a uniform shift. The infinite line is
truncated to 2m+1 periods and the shift average uses q equispaced shifts.
"""
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from mercer.expansion import nystrom_from_matrix
from numerics.exceptions import DomainError, TruncationWarning
from numerics.linalg import as_hermitian, logdet_hpd
from numerics.models import Interval
from numerics.quadrature import integrate
from sampled.covariance import (
    mutual_information, receive_covariance, resolve_source_sampling, white_noise_covariance,
)
from sampled.models import SamplingLayout, SourceAutocorrelation

from .models import ChainCheck, StationarizedSource, TrialResult

logger = logging.getLogger(__name__)

# Relative move of the truncated MI from m to m+1 periods still counted as settled
STABILITY_TOLERANCE = 0.01

PSD_CHECK_POINTS = 64


def _check_psd(r_j):
    nodes, weights = r_j.support.trapezoid(PSD_CHECK_POINTS)
    spectrum = nystrom_from_matrix(r_j.matrix(nodes, nodes), nodes, weights, 1, r_j.support.width)
    return spectrum.eigenvalues[0]


def stationarize(r_j):
    """
    Shift-average the period-L extension of ``r_j``:

        R(lag) = (1/L) * integral of R_J(u, u - lag) over the u for which
                 both u and u - lag lie in the source interval.
    """
    top = _check_psd(r_j)
    support = r_j.support
    length = support.width
    abs_tol = 1e-12 * max(top / length, np.finfo(float).tiny)

    def shift_average(lag):
        lo, hi = max(support.lo, support.lo + lag), min(support.hi, support.hi + lag)
        if hi - lo <= 1e-12 * length:
            return 0j
        value = integrate(lambda u: complex(r_j.pairwise(u, u - lag)), Interval(lo, hi), abs_tol)
        return value / length

    def lag_fn(lag):
        lag = np.asarray(lag, dtype=float)
        flat = [shift_average(x) if abs(x) < length else 0j for x in lag.ravel()]
        return np.asarray(flat, dtype=complex).reshape(lag.shape)

    return StationarizedSource(period=length, lag_fn=lag_fn)


def periodic_extension(r_j, truncation):
    """Independent copies of ``r_j`` in the periods -m..m around its support."""
    start, length = r_j.support.lo, r_j.support.width

    def fn(s, t):
        k_s = np.floor((s - start) / length)
        k_t = np.floor((t - start) / length)
        same = (k_s == k_t) & (np.abs(k_s) <= truncation)
        return np.where(same, r_j.pairwise(s - k_s * length, t - k_t * length), 0.0)

    return fn


def virtual_line_source(r_j, truncation, shifts):
    """
    The stationarized source on 2m+1 periods, averaged over ``shifts``
    equispaced offsets of one period.
    """
    if truncation < 0 or shifts < 1:
        raise DomainError(f'need truncation >= 0 and shifts >= 1, got {truncation}, {shifts}')
    extension = periodic_extension(r_j, truncation)
    offsets = r_j.support.width * np.arange(shifts) / shifts

    def fn(s, t):
        total = 0.0
        for theta in offsets:
            total = total + extension(s + theta, t + theta)
        return total / shifts

    reach = truncation * r_j.support.width
    support = Interval(r_j.support.lo - reach, r_j.support.hi + reach)
    return SourceAutocorrelation.general(fn, support)


def _destination_mi(scene, r_j, source_count, dest, dest_count, variance):
    layout = SamplingLayout.for_lines(scene, r_j.support, source_count, dest, dest_count)
    k_e = receive_covariance(scene, layout, r_j)
    return mutual_information(k_e, white_noise_covariance(layout, variance))


def _wide_destination(r_j):
    support = r_j.support
    return Interval(support.lo - support.width, support.hi)


def resolve_source_count(scene, r_j, n):
    """
    Source samples per period, starting from ``n`` and doubled until the
    field on the length-2L destination is resolved. Doubling keeps the count
    a multiple of any shift count that divides ``n``.
    """
    layout = SamplingLayout.for_lines(scene, r_j.support, n, _wide_destination(r_j), 2 * n)
    resolved, _ = resolve_source_sampling(scene, layout, r_j)
    return resolved.source_weights.size


def mi_finite_finite(scene, r_j, variance, n, dest_start=None, source_count=None):
    """
    MI between the source and a length-L destination whose lowest point is
    ``dest_start``. The source is sampled at ``source_count`` points (n by
    default).
    """
    support = r_j.support
    start = support.lo if dest_start is None else dest_start
    return _destination_mi(scene, r_j, source_count or n, Interval(start, start + support.width), n, variance)


def mi_source_shift_sweep(scene, r_j, variance, n, offsets=None):
    """
    MI to a length-2L destination for each offset of its lowest point
    from the source's lowest point. Offsets default to -kL/16, k = 0..16;
    they reuse the length-L sample points when they are multiples of L/n.
    The source sampling is resolved once and shared by every offset.
    """
    support = r_j.support
    length = support.width
    if offsets is None:
        offsets = -length * np.arange(17) / 16
    source_count = resolve_source_count(scene, r_j, n)
    sweep = []
    for offset in offsets:
        start = support.lo + float(offset)
        mi = _destination_mi(scene, r_j, source_count, Interval(start, start + 2 * length), 2 * n, variance)
        sweep.append((float(offset), mi))
    return sweep


def mi_stationarized(scene, r_j, variance, n, truncation, shifts, source_count=None):
    """
    MI from the truncated stationarized source to the length-2L destination,
    with ``source_count`` samples per period (n by default).
    """
    virtual = virtual_line_source(r_j, truncation, shifts)
    per_period = source_count or n
    return _destination_mi(
        scene, virtual, (2 * truncation + 1) * per_period, _wide_destination(r_j), 2 * n, variance,
    )


def mi_chain_check(scene, r_j, variance, n=16, truncation=4, shifts=16):
    """
    Evaluate the three MIs of the bound chain for one source.

    The length-2L destination starts one period below the source, so the
    length-L destination samples are a subset of its samples. All three
    MIs share one source sampling, resolved on the length-2L destination.
    The chain holds within 1e-6 * I_LL; ``stable`` reports whether one more
    period on each side moves I_inf2L by at most 1%.
    """
    if n < 16 or n % 2 or n % shifts:
        raise DomainError(f'n must be even, at least 16 and a multiple of the shift count (n={n}, q={shifts})')
    if truncation < 3 or shifts < 8:
        raise DomainError(f'need at least 3 periods per side and 8 shifts (m={truncation}, q={shifts})')

    source_count = resolve_source_count(scene, r_j, n)
    i_ll = mi_finite_finite(scene, r_j, variance, n, source_count=source_count)
    i_l2l = _destination_mi(scene, r_j, source_count, _wide_destination(r_j), 2 * n, variance)
    i_inf2l = mi_stationarized(scene, r_j, variance, n, truncation, shifts, source_count)
    i_next = mi_stationarized(scene, r_j, variance, n, truncation + 1, shifts, source_count)

    stable = abs(i_next - i_inf2l) <= STABILITY_TOLERANCE * i_inf2l
    if not stable:
        message = (f'stationarized MI not settled: {i_inf2l:.6g} nats at m={truncation}, '
                   f'{i_next:.6g} at m={truncation + 1}')
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=2)

    tol = 1e-6 * i_ll
    holds = i_ll <= i_l2l + tol and i_l2l <= i_inf2l + tol
    logger.debug('chain %.6g <= %.6g <= %.6g: %s', i_ll, i_l2l, i_inf2l, holds)
    return ChainCheck(i_ll=i_ll, i_l2l=i_l2l, i_inf2l=i_inf2l, holds=holds, stable=stable)


def entropy_sum_check(k_x, k_y, k_n):
    """log det(K_X + K_Y + K_N) >= log det(K_X + K_N): adding independent signal never lowers entropy."""
    k_x, k_y, k_n = as_hermitian(k_x), as_hermitian(k_y), as_hermitian(k_n)
    return logdet_hpd(k_x + k_y + k_n) >= logdet_hpd(k_x + k_n) - 1e-10


def random_source_autocorrelation(support, rng, rank=4, harmonics=4):
    """
    A random Hermitian PSD autocorrelation sum_r f_r(s) conj(f_r(s')),
    each feature f_r a random complex combination of phase-shifted cosines.
    """
    coefficients = rng.standard_normal((rank, harmonics)) + 1j * rng.standard_normal((rank, harmonics))
    coefficients /= math.sqrt(2 * rank * harmonics)
    phases = rng.uniform(0.0, 2 * math.pi, (rank, harmonics))
    orders = math.pi * np.arange(harmonics)

    def features(s):
        u = (np.asarray(s, dtype=float) - support.lo) / support.width
        waves = np.cos(u[..., None, None] * orders + phases)
        return np.sum(coefficients * waves, axis=-1)

    def fn(s, t):
        return np.sum(features(s) * np.conj(features(t)), axis=-1)

    return SourceAutocorrelation.general(fn, support)


def trial_seed(seed, trial):
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def run_chain_trials(scene, length, variance=1e4, n=16, truncation=4, shifts=16, trials=50, seed=0):
    """
    Run the bound chain on ``trials`` random sources of the given length.

    Each trial draws from its own generator seeded by (seed, trial), so
    results do not depend on the thread count. Results are in trial order.
    """
    support = Interval(0.0, length)

    def run(trial):
        trial_seed_value = trial_seed(seed, trial)
        r_j = random_source_autocorrelation(support, np.random.default_rng(trial_seed_value))
        check = mi_chain_check(scene, r_j, variance, n, truncation, shifts)
        logger.debug('trial %d (seed %d): holds=%s stable=%s', trial, trial_seed_value, check.holds, check.stable)
        return TrialResult(trial=trial, seed=trial_seed_value, check=check)

    with ThreadPoolExecutor(max_workers=settings.EMCAP_THREADS) as pool:
        return list(pool.map(run, range(trials)))
