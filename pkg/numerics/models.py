import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class Interval:
    """A finite, non-degenerate closed interval [lo, hi]"""
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f'interval bounds must be finite, got [{lo}, {hi}]')
        if not lo < hi:
            raise DomainError(f'interval needs lo < hi, got [{lo}, {hi}]')
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, slack=0.0):
        x = np.asarray(x)
        return (x >= self.lo - slack) & (x <= self.hi + slack)

    def midpoints(self, count):
        """
        Midpoint-rule nodes and weights for ``count`` equal cells
        """
        if count < 1:
            raise DomainError(f'need at least one cell, got {count}')
        step = self.width / count
        nodes = self.lo + (np.arange(count) + 0.5) * step
        return nodes, np.full(count, step)

    def trapezoid(self, count):
        """
        Trapezoid-rule nodes (both ends included) and weights
        """
        if count < 2:
            raise DomainError(f'trapezoid rule needs two nodes, got {count}')
        nodes = np.linspace(self.lo, self.hi, count)
        step = self.width / (count - 1)
        weights = np.full(count, step)
        weights[0] = weights[-1] = 0.5 * step
        return nodes, weights
