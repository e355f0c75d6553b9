"""
Bessel functions of order zero and one.

Thin, validated wrappers around ``scipy.special``. Every function takes a
scalar or an array and returns the same shape; scalars come back as
plain floats.
"""
import numpy as np
from scipy import special

from .exceptions import DomainError


def _finite(x, name):
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f'{name} needs finite arguments')
    return values


def _positive(x, name):
    values = _finite(x, name)
    if np.any(values <= 0):
        # Y0, K0 and K1 are singular at the origin
        raise DomainError(f'{name} is only defined for x > 0')
    return values


def _shaped(result, values):
    if values.ndim == 0:
        return float(result)
    return result


def bessel_j0(x):
    values = _finite(x, 'bessel_j0')
    return _shaped(special.j0(values), values)


def bessel_j1(x):
    values = _finite(x, 'bessel_j1')
    return _shaped(special.j1(values), values)


def bessel_y0(x):
    values = _positive(x, 'bessel_y0')
    return _shaped(special.y0(values), values)


def bessel_y1(x):
    values = _positive(x, 'bessel_y1')
    return _shaped(special.y1(values), values)


def bessel_k0(x):
    values = _positive(x, 'bessel_k0')
    return _shaped(special.k0(values), values)


def bessel_k1(x):
    values = _positive(x, 'bessel_k1')
    return _shaped(special.k1(values), values)
