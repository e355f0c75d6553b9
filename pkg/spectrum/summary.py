import logging

import numpy as np

logger = logging.getLogger(__name__)


def side_lobe_ratio(spectrum, scene):
    """
    Peak of |G| beyond the main lobe over the peak inside it.

    The main lobe ends at the first local minimum of |G| at or beyond
    kappa0 on the positive axis; |G| is even, so one side is enough.
    """
    kappa = spectrum.kappa
    magnitude = spectrum.magnitude
    positive = kappa > 0
    kappa, magnitude = kappa[positive], magnitude[positive]

    first = int(np.searchsorted(kappa, scene.wavenumber))
    for i in range(max(first, 1), kappa.size - 1):
        if magnitude[i] < magnitude[i - 1] and magnitude[i] <= magnitude[i + 1]:
            main = float(np.max(magnitude[:i + 1]))
            side = float(np.max(magnitude[i + 1:]))
            logger.debug('main lobe ends at kappa=%.4g for %s', kappa[i], scene)
            return side / main if main > 0 else 0.0
    return 0.0


def spectral_energy(spectrum):
    return spectrum.energy()
