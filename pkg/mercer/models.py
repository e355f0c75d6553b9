import math
from dataclasses import dataclass, replace

import numpy as np

from numerics.exceptions import DomainError, ShapeError


@dataclass(frozen=True)
class ExponentialKernelParams:
    """
    R_E(r, r') = P exp(-alpha |r - r'|) on a destination [0, L].

    P is the received-field power, not a source power budget.
    """
    power: float
    alpha: float
    length: float

    def __post_init__(self):
        for name in ('power', 'alpha', 'length'):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f'{name} must be positive, got {value}')
            object.__setattr__(self, name, value)

    def with_length(self, length):
        return replace(self, length=length)

    def kernel(self, r, r_prime):
        return self.power * np.exp(-self.alpha * np.abs(np.asarray(r) - np.asarray(r_prime)))

    @property
    def trace(self):
        return self.power * self.length


@dataclass(frozen=True, eq=False)
class MercerSpectrum:
    """
    Eigenvalues (non-increasing) and, when sampled, eigenfunctions of a
    kernel on [0, L].

    ``eigenfunctions`` has one column per mode on ``nodes``; ``weights``
    are the quadrature weights the sampled functions are orthonormal
    under. Closed-form spectra also carry ``frequencies`` and
    ``normalizations``. ``trace`` is the integral of R(r, r) over [0, L].
    """
    eigenvalues: np.ndarray
    length: float
    trace: float
    frequencies: np.ndarray = None
    normalizations: np.ndarray = None
    nodes: np.ndarray = None
    weights: np.ndarray = None
    eigenfunctions: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.eigenvalues, dtype=float)
        if values.ndim != 1:
            raise ShapeError('eigenvalues must be a vector')
        if values.size and (np.any(values < 0) or np.any(np.diff(values) > 1e-12 * values[0])):
            raise DomainError('eigenvalues must be non-negative and non-increasing')
        if self.eigenfunctions is not None and self.eigenfunctions.shape != (self.nodes.size, values.size):
            raise ShapeError(f'{self.eigenfunctions.shape} eigenfunction samples for {values.size} modes')
        object.__setattr__(self, 'eigenvalues', values)

    @property
    def count(self):
        return self.eigenvalues.size

    @property
    def is_sampled(self):
        return self.eigenfunctions is not None

    def gram(self):
        """Weighted Gram matrix of the sampled eigenfunctions (identity when orthonormal)."""
        if not self.is_sampled:
            raise DomainError('spectrum was built without eigenfunction samples')
        phi = self.eigenfunctions
        return phi.conj().T @ (self.weights[:, None] * phi)

    def noise_gram(self, n0):
        """Covariance of white noise of PSD n0/2 projected on the sampled modes."""
        return 0.5 * n0 * self.gram()

    def reconstruct_diagonal(self, count):
        """Partial Mercer sum of lambda_k |phi_k(r)|^2 over the first ``count`` modes, on the nodes."""
        if not self.is_sampled:
            raise DomainError('spectrum was built without eigenfunction samples')
        phi = self.eigenfunctions[:, :count]
        return np.abs(phi) ** 2 @ self.eigenvalues[:count]


@dataclass(frozen=True)
class MercerInformation:
    nats: float
    tail_bound: float
    modes: int

    @property
    def bits(self):
        return self.nats / math.log(2)
