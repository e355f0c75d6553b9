import math
from dataclasses import dataclass

import numpy as np

from numerics.exceptions import DomainError, ShapeError
from spectrum.models import SpectralDensity

SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """
    Noise spatial spectral density: either white (one density value) or
    tabulated on a wavenumber grid. Densities are strictly positive.
    """
    kind: str
    white_ssd: float = None
    density: SpectralDensity = None

    def __post_init__(self):
        if self.kind == 'white':
            value = float(self.white_ssd)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f'white noise density must be positive, got {value}')
            object.__setattr__(self, 'white_ssd', value)
        elif self.kind == 'tabulated':
            values = self.density.values
            if self.density.kind != 'density' or not np.all(np.isfinite(values)) or np.any(values <= 0):
                raise DomainError('tabulated noise densities must be positive and finite')
        else:
            raise DomainError(f'unknown noise kind {self.kind!r}')

    @classmethod
    def white(cls, ssd):
        return cls('white', white_ssd=ssd)

    @classmethod
    def from_variance(cls, variance):
        """White noise of spatial variance sigma^2, i.e. density sigma^2/sqrt(2 pi)."""
        return cls.white(variance / SQRT_2PI)

    @classmethod
    def tabulated(cls, density):
        return cls('tabulated', density=density)

    def on_grid(self, grid):
        if self.kind == 'white':
            return SpectralDensity(grid, np.full(grid.count, self.white_ssd))
        if not self.density.grid.matches(grid):
            raise ShapeError('tabulated noise lives on a different wavenumber grid')
        return self.density


@dataclass(frozen=True, eq=False)
class WaterfillResult:
    s_j: SpectralDensity
    noise_eq: SpectralDensity
    water_level: float
    lagrange: float
    capacity: float

    @property
    def allocated_power(self):
        return self.s_j.integral()

    @property
    def support(self):
        return self.s_j.values > 0

    def kkt_residual(self):
        """Largest relative deviation of S_J + S_N' from the water level on the support."""
        support = self.support
        if not np.any(support):
            return 0.0
        level = self.s_j.values[support] + self.noise_eq.values[support]
        return float(np.max(np.abs(level - self.water_level))) / self.water_level

    @property
    def capacity_bits(self):
        return self.capacity / math.log(2)
