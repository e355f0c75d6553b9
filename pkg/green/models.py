import math
from dataclasses import dataclass, field

import numpy as np

from numerics.exceptions import DomainError

# Free-space wave impedance mu0 * c, in ohms
FREE_SPACE_IMPEDANCE = 120 * math.pi


@dataclass(frozen=True)
class PhysicalScene:
    """
    Two parallel lines in free space: wavelength and separation in meters
    """
    wavelength: float
    distance: float

    def __post_init__(self):
        for name in ('wavelength', 'distance'):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f'{name} must be a positive finite length, got {value}')
            object.__setattr__(self, name, value)

    @property
    def wavenumber(self):
        return 2 * math.pi / self.wavelength

    @property
    def impedance(self):
        return FREE_SPACE_IMPEDANCE

    def __str__(self):
        return f'wavelength={self.wavelength:g} distance={self.distance:g}'


@dataclass(frozen=True, eq=False)
class DyadicGreenSample:
    matrix: np.ndarray
    separation: np.ndarray
    projector: np.ndarray = field(init=False)

    def __post_init__(self):
        unit = self.separation / np.linalg.norm(self.separation)
        object.__setattr__(self, 'projector', np.eye(3) - np.outer(unit, unit.conj()))
