from dataclasses import dataclass

import numpy as np

from numerics.exceptions import DomainError
from numerics.models import Interval

# Pairs drawn when spot-checking an autocorrelation
SPOT_CHECKS = 16


def uniform_line(region, count, dim=1, offset=0.0):
    """
    Midpoint-rule samples of a line segment. In 3-D the line runs along x
    at height ``offset`` on y.
    """
    nodes, weights = region.midpoints(count)
    if dim == 1:
        return nodes, weights
    if dim != 3:
        raise DomainError(f'layouts are 1-D or 3-D, got dim={dim}')
    points = np.zeros((count, 3))
    points[:, 0] = nodes
    points[:, 1] = offset
    return points, weights


@dataclass(frozen=True, eq=False)
class SamplingLayout:
    """
    Quadrature samples of the source and the destination lines.

    1-D layouts hold x coordinates (the line separation comes from the
    scene); 3-D layouts hold full positions.
    """
    source_region: Interval
    dest_region: Interval
    source_points: np.ndarray
    source_weights: np.ndarray
    dest_points: np.ndarray
    dest_weights: np.ndarray
    dim: int = 1
    height: float = 0.0

    def __post_init__(self):
        for side in ('source', 'dest'):
            points = np.asarray(getattr(self, f'{side}_points'), dtype=float)
            weights = np.asarray(getattr(self, f'{side}_weights'), dtype=float)
            expected = (weights.size,) if self.dim == 1 else (weights.size, 3)
            if weights.ndim != 1 or weights.size < 1 or points.shape != expected:
                raise DomainError(f'{side} layout needs at least one point of dimension {self.dim}')
            if np.any(weights <= 0):
                raise DomainError(f'{side} quadrature weights must be positive')
            axis = points if self.dim == 1 else points[:, 0]
            region = getattr(self, f'{side}_region')
            if not np.all(region.contains(axis, slack=1e-12 * region.width)):
                raise DomainError(f'{side} points fall outside [{region.lo:g}, {region.hi:g}]')
            object.__setattr__(self, f'{side}_points', points)
            object.__setattr__(self, f'{side}_weights', weights)

    @classmethod
    def for_lines(cls, scene, source, source_count, dest, dest_count, dim=1):
        source_points, source_weights = uniform_line(source, source_count, dim)
        dest_points, dest_weights = uniform_line(dest, dest_count, dim, offset=scene.distance)
        return cls(source, dest, source_points, source_weights, dest_points, dest_weights, dim, scene.distance)

    def with_source_count(self, count):
        points, weights = uniform_line(self.source_region, count, self.dim)
        return SamplingLayout(
            self.source_region, self.dest_region, points, weights,
            self.dest_points, self.dest_weights, self.dim, self.height,
        )

    @property
    def source_axis(self):
        return self.source_points if self.dim == 1 else self.source_points[:, 0]

    @property
    def dest_axis(self):
        return self.dest_points if self.dim == 1 else self.dest_points[:, 0]

    @property
    def dest_size(self):
        return self.dest_weights.size * self.dim


@dataclass(frozen=True, eq=False)
class SourceAutocorrelation:
    """
    R_J(s, s') of the source current on its support, zero outside.

    ``stationary`` wraps a function of the lag s - s'; ``general`` a
    function of both positions. Both must accept numpy arrays.
    """
    kind: str
    fn: object
    support: Interval

    def __post_init__(self):
        if self.kind not in ('stationary', 'general'):
            raise DomainError(f'unknown autocorrelation kind {self.kind!r}')
        self._spot_check()

    @classmethod
    def stationary(cls, fn, support):
        return cls('stationary', fn, support)

    @classmethod
    def general(cls, fn, support):
        return cls('general', fn, support)

    def _evaluate(self, s, t):
        if self.kind == 'stationary':
            return np.asarray(self.fn(s - t))
        return np.asarray(self.fn(s, t))

    def _spot_check(self):
        rng = np.random.default_rng(0)
        s = self.support.lo + self.support.width * rng.random(SPOT_CHECKS)
        t = self.support.lo + self.support.width * rng.random(SPOT_CHECKS)
        forward = self._evaluate(s, t) * np.ones(SPOT_CHECKS)
        backward = self._evaluate(t, s) * np.ones(SPOT_CHECKS)
        diagonal = self._evaluate(s, s) * np.ones(SPOT_CHECKS)
        scale = max(float(np.max(np.abs(diagonal))), float(np.max(np.abs(forward))), 1e-300)
        if not np.all(np.isfinite(forward)) or np.max(np.abs(forward - np.conj(backward))) > 1e-10 * scale:
            raise DomainError('source autocorrelation is not Hermitian')
        if np.max(np.abs(np.imag(diagonal))) > 1e-10 * scale or np.min(np.real(diagonal)) < -1e-10 * scale:
            raise DomainError('source autocorrelation must be real and non-negative on the diagonal')

    def pairwise(self, s, t):
        """R_J(s, t) for broadcastable position arrays; zero where either point is off the support."""
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        slack = 1e-12 * self.support.width
        values = self._evaluate(s, t) * np.ones(s.shape)
        inside = self.support.contains(s, slack) & self.support.contains(t, slack)
        return np.where(inside, values, 0.0)

    def matrix(self, s, t):
        """R_J on the outer grid s x t."""
        s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
        return self.pairwise(s[:, None], t[None, :])

    def diagonal(self, s):
        s = np.asarray(s, dtype=float)
        values = np.real(self._evaluate(s, s)) * np.ones(s.size)
        return np.where(self.support.contains(s, 1e-12 * self.support.width), values, 0.0)


@dataclass(frozen=True)
class SweepPoint:
    n: int
    mi_nats: float
    mi_per_meter: float
