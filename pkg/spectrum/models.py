import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy import integrate as scipy_integrate

from numerics.exceptions import DomainError, GridError, ShapeError


@dataclass(frozen=True, eq=False)
class WavenumberGrid:
    """Uniformly spaced wavenumbers in rad/m, strictly increasing"""
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise GridError('a wavenumber grid needs at least two samples')
        if not np.all(np.isfinite(samples)):
            raise GridError('wavenumber grid samples must be finite')
        steps = np.diff(samples)
        if np.any(steps <= 0):
            raise GridError('wavenumber grid must be strictly increasing')
        if np.max(np.abs(steps - steps.mean())) > 1e-12 * max(1.0, float(np.max(np.abs(samples)))):
            raise GridError('wavenumber grid must be uniformly spaced')
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @classmethod
    def linspace(cls, lo, hi, count):
        return cls(np.linspace(lo, hi, count))

    @classmethod
    def symmetric(cls, half_width, count, avoid=None):
        """
        Even number of nodes at half-integer multiples of the spacing.

        With ``avoid`` (normally kappa0) the spacing is widened just enough
        that avoid/spacing has fractional part 1/4: then +-avoid sits a
        quarter cell away from both the nodes and the integer multiples
        of the spacing.
        """
        if count < 2 or count % 2:
            raise GridError(f'symmetric grids need an even sample count, got {count}')
        if half_width <= 0:
            raise GridError(f'half width must be positive, got {half_width}')
        spacing = 2 * half_width / count
        if avoid is not None:
            cells = math.floor(avoid / spacing - 0.25)
            if cells < 1:
                raise GridError(
                    f'spacing {spacing:.3g} cannot resolve the branch point at {avoid:.3g}; use more samples'
                )
            spacing = avoid / (cells + 0.25)
        return cls((np.arange(count) - count / 2 + 0.5) * spacing)

    @classmethod
    def for_scene(cls, scene, count=None, half_width=None):
        """Default grid: wide enough for the e^{-d|kappa|} decay of the spectrum."""
        count = count or settings.EMCAP_SPECTRUM_SAMPLES
        if half_width is None:
            k0 = scene.wavenumber
            half_width = max(settings.EMCAP_SPECTRUM_SPAN * k0, k0 + settings.EMCAP_SPECTRUM_DECAY / scene.distance)
        return cls.symmetric(half_width, count, avoid=scene.wavenumber)

    @property
    def count(self):
        return self.samples.size

    @property
    def spacing(self):
        return (self.samples[-1] - self.samples[0]) / (self.count - 1)

    @property
    def is_symmetric(self):
        return self.count % 2 == 0 and abs(self.samples[0] + self.samples[-1]) <= 1e-9 * self.spacing

    def trapezoid_weights(self):
        weights = np.full(self.count, self.spacing)
        weights[0] = weights[-1] = 0.5 * self.spacing
        return weights

    def matches(self, other):
        return self is other or (
            self.count == other.count and np.allclose(self.samples, other.samples, rtol=0, atol=1e-12 * self.spacing)
        )


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """
    Values on a wavenumber grid. ``density`` instances are non-negative
    reals (+inf marks an excluded bin); ``transfer`` instances are complex.
    """
    grid: WavenumberGrid
    values: np.ndarray
    kind: str = 'density'

    def __post_init__(self):
        if self.kind not in ('density', 'transfer'):
            raise DomainError(f'unknown spectral kind {self.kind!r}')
        dtype = float if self.kind == 'density' else complex
        values = np.array(self.values, dtype=dtype)
        if values.shape != self.grid.samples.shape:
            raise ShapeError(f'{values.shape[0] if values.ndim else 0} values on a grid of {self.grid.count}')
        if self.kind == 'density' and (np.any(np.isnan(values)) or np.any(values < 0)):
            raise DomainError('spectral densities must be non-negative')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def kappa(self):
        return self.grid.samples

    @property
    def magnitude(self):
        return np.abs(self.values)

    def require_same_grid(self, other):
        if not self.grid.matches(other.grid):
            raise ShapeError('spectral densities live on different grids')

    def integral(self):
        total = scipy_integrate.trapezoid(self.values, self.kappa)
        return float(total) if self.kind == 'density' else complex(total)

    def energy(self):
        return float(scipy_integrate.trapezoid(np.abs(self.values) ** 2, self.kappa))

    def scaled(self, factor):
        return SpectralDensity(self.grid, self.values * factor, self.kind)
