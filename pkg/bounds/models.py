from dataclasses import dataclass

import numpy as np

from numerics.exceptions import DomainError


@dataclass(frozen=True, eq=False)
class StationarizedSource:
    """
    The shift-averaged periodic extension of a finite source.

    Independent copies of the source are laid end to end with period L
    and shifted by a uniform random offset; the result is stationary with
    autocorrelation ``lag_fn`` of the lag s - s', zero for |lag| >= L.
    The finite stand-in used for mutual information, 2m+1 periods and q
    discrete shifts, is built by ``bounds.chain.virtual_line_source``.
    """
    period: float
    lag_fn: object

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError(f'period must be positive, got {self.period}')

    def autocorrelation(self, lag):
        lag = np.asarray(lag, dtype=float)
        values = np.asarray(self.lag_fn(lag), dtype=complex) * np.ones(lag.shape)
        return np.where(np.abs(lag) < self.period, values, 0.0)


@dataclass(frozen=True)
class ChainCheck:
    i_ll: float
    i_l2l: float
    i_inf2l: float
    holds: bool
    stable: bool


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    check: ChainCheck
