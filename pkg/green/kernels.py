"""
Green kernels between the source line and the destination line.

The source runs along x at the origin and the destination runs along x
at height d, so a source point s and a field point r are separated by
(r - s, d, 0).
"""
import numpy as np

from numerics.exceptions import DomainError, SingularityError

from .models import DyadicGreenSample


def _prefactor(scene, r):
    return -1j * scene.impedance * np.exp(1j * scene.wavenumber * r) / (2 * scene.wavelength * r)


def scalar_kernel(scene, x):
    """
    xx-element g(x) of the Green function between the two lines, with the
    1/r^2 and 1/r^3 near-field terms kept.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError('scalar_kernel needs finite offsets')
    d = scene.distance
    r = np.hypot(x, d)
    kr = scene.wavenumber * r
    cross = (d * d - 2 * x * x) / (r * r)
    bracket = (d * d) / (r * r) + (1j / kr) * cross - cross / (kr * kr)
    value = _prefactor(scene, r) * bracket
    return complex(value) if value.ndim == 0 else value


def near_field_terms(scene, x):
    """
    Part of ``scalar_kernel`` beyond the xx-element of ``dyadic_green``.
    """
    x = np.asarray(x, dtype=float)
    d = scene.distance
    r = np.hypot(x, d)
    kr = scene.wavenumber * r
    cross = (d * d - 2 * x * x) / (r * r)
    value = _prefactor(scene, r) * ((1j / kr) * cross - cross / (kr * kr))
    return complex(value) if value.ndim == 0 else value


def dyadic_blocks(scene, separations):
    """
    Far-field dyadic Green function for an array of separations with
    shape (..., 3); returns shape (..., 3, 3).
    """
    p = np.asarray(separations, dtype=float)
    if p.shape[-1] != 3:
        raise DomainError(f'separations must be 3-vectors, got shape {p.shape}')
    if not np.all(np.isfinite(p)):
        raise DomainError('dyadic_green needs finite separations')
    norm = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise SingularityError('dyadic Green function is singular at zero separation')
    unit = p / norm
    projector = np.eye(3) - unit[..., :, None] * unit[..., None, :]
    scale = -1j * scene.wavenumber * scene.impedance / (4 * np.pi) * np.exp(1j * scene.wavenumber * norm) / norm
    return scale[..., None] * projector


def dyadic_green(scene, p):
    p = np.asarray(p, dtype=float)
    return DyadicGreenSample(matrix=dyadic_blocks(scene, p), separation=p)
