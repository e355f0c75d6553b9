"""
Covariance of the received field and mutual information of sampled lines.

The field at the destination samples is E = (G W) J with W the source
quadrature weights, so K_E = (G W) R_J (G W)^H.
"""
import logging
import math
import warnings

import numpy as np
from django.conf import settings
from scipy import linalg as scipy_linalg

from green.kernels import dyadic_blocks, scalar_kernel
from numerics.exceptions import ConditioningError, DomainError, NotPositiveSemidefiniteError, ResolutionWarning, ShapeError
from numerics.linalg import as_hermitian, clip_psd, eigvalsh_desc, hermitian_part
from numerics.models import Interval

from .models import SamplingLayout, SweepPoint

logger = logging.getLogger(__name__)

# Relative change of ||K_E|| under source refinement that counts as unresolved
RESOLUTION_TOLERANCE = 0.01


def transfer_matrix(scene, layout):
    """G W: destination samples by source samples (3x3 blocks in 3-D)."""
    if layout.dim == 1:
        offsets = layout.dest_points[:, None] - layout.source_points[None, :]
        return scalar_kernel(scene, offsets) * layout.source_weights[None, :]
    blocks = dyadic_blocks(scene, layout.dest_points[:, None, :] - layout.source_points[None, :, :])
    blocks = blocks * layout.source_weights[None, :, None, None]
    rows, cols = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(3 * rows, 3 * cols)


def _assemble(scene, layout, r_j):
    gw = transfer_matrix(scene, layout)
    r = r_j.matrix(layout.source_axis, layout.source_axis)
    if layout.dim == 3:
        # isotropically polarised source
        r = np.kron(r, np.eye(3))
    k_e = hermitian_part(gw @ r @ gw.conj().T)
    values = np.linalg.eigvalsh(k_e)
    top = float(np.max(np.abs(values))) if values.size else 0.0
    if values.size and values[0] < -settings.EMCAP_PSD_TOLERANCE * max(top, np.finfo(float).tiny):
        raise NotPositiveSemidefiniteError(
            f'received covariance has eigenvalue {values[0]:.3g} against {top:.3g}; is R_J positive semidefinite?'
        )
    return clip_psd(k_e)


def _check_support(layout, r_j):
    slack = 1e-12 * r_j.support.width
    if not (r_j.support.contains(layout.source_region.lo, slack)
            and r_j.support.contains(layout.source_region.hi, slack)):
        raise DomainError('source samples extend beyond the support of the autocorrelation')


def _relative_change(coarse, fine):
    norm = np.linalg.norm(fine)
    return float(np.linalg.norm(fine - coarse) / norm) if norm > 0 else 0.0


def _warn_unresolved(count, change, stacklevel):
    message = f'source quadrature unresolved: doubling {count} points changes K_E by {100 * change:.1f}%'
    logger.warning(message)
    warnings.warn(message, ResolutionWarning, stacklevel=stacklevel + 1)


def receive_covariance(scene, layout, r_j, check_resolution=False):
    """
    K_E on the destination samples.

    With ``check_resolution`` the source sampling is doubled once and a
    ResolutionWarning is issued when ||K_E|| moves by more than 1%.
    """
    _check_support(layout, r_j)
    k_e = _assemble(scene, layout, r_j)
    if check_resolution:
        refined = _assemble(scene, layout.with_source_count(2 * layout.source_weights.size), r_j)
        change = _relative_change(k_e, refined)
        if change > RESOLUTION_TOLERANCE:
            _warn_unresolved(layout.source_weights.size, change, stacklevel=2)
    return k_e


def resolve_source_sampling(scene, layout, r_j, tolerance=None):
    """
    Double the source sampling of ``layout`` until doubling once more moves
    K_E by at most ``tolerance`` (relative Frobenius norm, 1% by default).

    Returns the first layout that passes together with its K_E. After
    EMCAP_SOURCE_REFINEMENTS failed doublings the finest layout is returned
    with a ResolutionWarning.
    """
    if tolerance is None:
        tolerance = RESOLUTION_TOLERANCE
    _check_support(layout, r_j)
    k_e = _assemble(scene, layout, r_j)
    change = math.inf
    for _ in range(settings.EMCAP_SOURCE_REFINEMENTS):
        finer = layout.with_source_count(2 * layout.source_weights.size)
        refined = _assemble(scene, finer, r_j)
        change = _relative_change(k_e, refined)
        if change <= tolerance:
            logger.debug('source sampling resolved at %d points (%.3g%%)', layout.source_weights.size, 100 * change)
            return layout, k_e
        layout, k_e = finer, refined
    _warn_unresolved(layout.source_weights.size // 2, change, stacklevel=2)
    return layout, k_e


def white_noise_covariance(layout, variance):
    """Sampled white noise: sigma^2 / w_i on the diagonal."""
    if not math.isfinite(variance) or variance <= 0:
        raise DomainError(f'noise variance must be positive, got {variance}')
    diagonal = variance / layout.dest_weights
    if layout.dim == 3:
        diagonal = np.repeat(diagonal, 3)
    return np.diag(diagonal)


def mutual_information(k_e, k_n):
    """
    log det(K_E + K_N) - log det(K_N) in nats.

    K_N is whitened by its Cholesky factor; the result is the sum of
    log(1 + mu) over the eigenvalues mu of L^-1 K_E L^-H.
    """
    k_e, k_n = as_hermitian(k_e), as_hermitian(k_n)
    if k_e.shape != k_n.shape:
        raise ShapeError(f'K_E is {k_e.shape} but K_N is {k_n.shape}')
    noise = eigvalsh_desc(k_n)
    if noise[-1] <= 0:
        raise DomainError('noise covariance must be positive definite')
    condition = noise[0] / noise[-1]
    if condition > settings.EMCAP_CONDITION_LIMIT:
        raise ConditioningError(f'noise covariance condition number {condition:.3g} is too large')

    factor = scipy_linalg.cholesky(hermitian_part(k_n), lower=True)
    half = scipy_linalg.solve_triangular(factor, k_e, lower=True)
    whitened = scipy_linalg.solve_triangular(factor, half.conj().T, lower=True).conj().T
    gains = np.linalg.eigvalsh(hermitian_part(whitened))
    return float(np.sum(np.log1p(np.clip(gains, 0.0, None))))


def normalized_capacity_sweep(scene, region_length, densities, r_j, variance, dest_start=None, source_density=None):
    """
    MI of a length-``region_length`` destination per meter, for each
    destination sampling density (samples per meter).

    The source sampling starts at ``source_density`` (the largest
    destination density by default) over the support of ``r_j`` and is
    refined per density until K_E is resolved; the resolved count carries
    over to the next density. The destination is centred on the source
    unless ``dest_start`` is given.
    """
    densities = [float(d) for d in densities]
    if not densities or any(d <= 0 for d in densities):
        raise DomainError('sampling densities must be positive')
    if any(b <= a for a, b in zip(densities, densities[1:])):
        raise DomainError('sampling densities must be increasing')
    if region_length <= 0:
        raise DomainError(f'region length must be positive, got {region_length}')

    support = r_j.support
    if dest_start is None:
        dest_start = support.midpoint - 0.5 * region_length
    dest = Interval(dest_start, dest_start + region_length)
    source_count = max(1, math.ceil((source_density or densities[-1]) * support.width))

    sweep = []
    for density in densities:
        n = max(1, round(density * region_length))
        layout = SamplingLayout.for_lines(scene, support, source_count, dest, n)
        layout, k_e = resolve_source_sampling(scene, layout, r_j)
        source_count = layout.source_weights.size
        mi = mutual_information(k_e, white_noise_covariance(layout, variance))
        logger.debug('density %g: n=%d, %d source points, MI=%.6g nats', density, n, source_count, mi)
        sweep.append(SweepPoint(n=n, mi_nats=mi, mi_per_meter=mi / region_length))
    return sweep
