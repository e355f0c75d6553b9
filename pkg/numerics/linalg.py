"""
Hermitian matrix helpers.

Matrices are plain numpy arrays; ``as_hermitian`` is the gate every
public operation passes its input through.
"""
import logging

import numpy as np
from django.conf import settings
from scipy import linalg as scipy_linalg

from .exceptions import DomainError, ShapeError

logger = logging.getLogger(__name__)


def hermitian_part(m):
    m = np.asarray(m)
    return 0.5 * (m + m.conj().T)


def as_hermitian(m, tol=None):
    """
    Return ``m`` as a square array after checking Hermitian symmetry to a
    relative tolerance (``EMCAP_PSD_TOLERANCE`` by default).
    """
    tol = settings.EMCAP_PSD_TOLERANCE if tol is None else tol
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f'expected a square matrix, got shape {m.shape}')
    if not np.all(np.isfinite(m)):
        raise DomainError('matrix has non-finite entries')
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return m
    deviation = float(np.max(np.abs(m - m.conj().T)))
    if deviation > tol * scale:
        raise DomainError(f'matrix is not Hermitian: deviation {deviation:.3g} on scale {scale:.3g}')
    return m


def _canonical_basis(vectors):
    """Orthonormal basis of span(vectors), built from the unit vectors in index order."""
    projector = vectors @ vectors.conj().T
    size = vectors.shape[1]
    basis = np.zeros_like(vectors)
    found = 0
    for column in projector.T:
        v = column - basis[:, :found] @ (basis[:, :found].conj().T @ column)
        # second pass keeps the columns orthogonal to round-off
        v = v - basis[:, :found] @ (basis[:, :found].conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            basis[:, found] = v / norm
            found += 1
            if found == size:
                return basis
    logger.debug('canonical basis incomplete (%d of %d); keeping solver vectors', found, size)
    return vectors


def _fix_phase(vectors):
    """Rotate each column so that its largest entry is real and positive."""
    lead = np.argmax(np.abs(vectors) > (1 - 1e-8) * np.max(np.abs(vectors), axis=0), axis=0)
    pivots = vectors[lead, np.arange(vectors.shape[1])]
    phases = pivots / np.abs(pivots)
    return vectors * phases.conj()


def eigh(m, tol=None):
    """
    Eigen-decomposition of a Hermitian matrix.

    Eigenvalues are returned in descending order with eigenvectors as
    columns. Vectors of a degenerate eigenvalue are replaced by the
    orthonormalized projections of the unit vectors taken in index
    order, then phase-fixed, so the output is reproducible.
    """
    m = as_hermitian(m, tol)
    values, vectors = np.linalg.eigh(hermitian_part(m))
    values, vectors = values[::-1], vectors[:, ::-1]

    if values.size:
        gap = 1e-10 * max(float(np.max(np.abs(values))), np.finfo(float).tiny)
        start = 0
        for stop in range(1, values.size + 1):
            if stop == values.size or values[stop - 1] - values[stop] > gap:
                if stop - start > 1:
                    vectors[:, start:stop] = _canonical_basis(vectors[:, start:stop])
                start = stop
        vectors = _fix_phase(vectors)
    return values, vectors


def eigvalsh_desc(m, tol=None):
    m = as_hermitian(m, tol)
    return np.linalg.eigvalsh(hermitian_part(m))[::-1]


def clip_psd(m):
    """Hermitize ``m`` and remove the (round-off) negative part of its spectrum."""
    m = hermitian_part(m)
    values, vectors = np.linalg.eigh(m)
    negative = values < 0
    if np.any(negative):
        part = vectors[:, negative]
        m = m - (part * values[negative]) @ part.conj().T
        m = hermitian_part(m)
    return m


def logdet_hpd(m):
    """log det of a Hermitian positive definite matrix via Cholesky"""
    try:
        factor = scipy_linalg.cholesky(hermitian_part(m), lower=True)
    except np.linalg.LinAlgError as e:
        raise DomainError(f'matrix is not positive definite: {e}') from e
    return 2.0 * float(np.sum(np.log(np.real(np.diag(factor)))))
