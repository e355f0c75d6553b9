import logging

import numpy as np
from scipy import optimize

from .exceptions import AccuracyError, BracketError

logger = logging.getLogger(__name__)


def find_root(f, bracket, tol=1e-12, maxiter=200):
    """
    Find a root of ``f`` inside ``bracket`` (an Interval).

    Brent's method keeps a bisection step in reserve, so convergence is
    guaranteed once the ends change sign. Returns x with the final
    bracket no wider than ``tol``.
    """
    f_lo, f_hi = float(f(bracket.lo)), float(f(bracket.hi))
    if f_lo == 0.0:
        return bracket.lo
    if f_hi == 0.0:
        return bracket.hi
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f'no sign change on [{bracket.lo:g}, {bracket.hi:g}]: f = {f_lo:.3g}, {f_hi:.3g}'
        )

    root, result = optimize.brentq(
        f, bracket.lo, bracket.hi, xtol=tol, maxiter=maxiter, full_output=True, disp=False
    )
    if not result.converged:
        raise AccuracyError(
            f'root finding stopped after {result.iterations} iterations',
            estimate=root,
            error=bracket.width,
        )
    logger.debug('root %.17g after %d iterations', root, result.iterations)
    return root
