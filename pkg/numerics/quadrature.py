"""Adaptive quadrature for real, complex and vector-valued integrands."""
import logging

import numpy as np
from scipy import integrate as scipy_integrate

from .exceptions import AccuracyError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 20000


def integrate_with_error(f, domain, abs_tol, rel_tol=0.0, points=(), limit=DEFAULT_LIMIT):
    """
    Integrate ``f`` over ``domain`` and return ``(value, error)``.

    ``f`` takes a float and returns a float, a complex number or an array
    of either. Declared ``points`` (interior singularities, kinks, taper
    edges) become panel boundaries. The Gauss-Kronrod panels never
    evaluate an endpoint, so integrable endpoint singularities are fine.
    """
    if abs_tol <= 0 and rel_tol <= 0:
        raise DomainError('integrate needs a positive abs_tol or rel_tol')

    first_value = np.asarray(f(domain.midpoint))
    is_complex = np.iscomplexobj(first_value)
    shape = first_value.shape

    if is_complex:
        def integrand(x):
            value = np.asarray(f(x), dtype=complex).ravel()
            return np.concatenate([value.real, value.imag])
    else:
        def integrand(x):
            return np.asarray(f(x), dtype=float).ravel()

    breaks = sorted({float(p) for p in points if domain.lo < p < domain.hi})
    value, error, info = scipy_integrate.quad_vec(
        integrand,
        domain.lo,
        domain.hi,
        epsabs=abs_tol,
        epsrel=rel_tol,
        norm='max',
        limit=limit,
        points=breaks or None,
        full_output=True,
    )

    if is_complex:
        half = value.size // 2
        value = value[:half] + 1j * value[half:]
    value = value.reshape(shape)
    if not shape:
        value = value.item()

    target = max(abs_tol, rel_tol * float(np.max(np.abs(value))))
    logger.debug('quad_vec on [%g, %g]: %d panels, error %.3g', domain.lo, domain.hi, info.intervals.shape[0], error)
    if info.status != 0 or error > target:
        raise AccuracyError(
            f'quadrature on [{domain.lo:g}, {domain.hi:g}] reached error {error:.3g} > {target:.3g}',
            estimate=value,
            error=error,
        )
    return value, error


def integrate(f, domain, abs_tol, rel_tol=0.0, points=(), limit=DEFAULT_LIMIT):
    """Integrate ``f`` over ``domain``; see ``integrate_with_error``."""
    value, _ = integrate_with_error(f, domain, abs_tol, rel_tol=rel_tol, points=points, limit=limit)
    return value
