"""
Django settings for the emcap project.

emcap is a batch numerical package: there are no views, templates or
database tables. Django supplies the management command surface, form
validation, the logging configuration and the test runner.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""
import logging
import os
from pathlib import Path

if os.path.isfile('env.py'):
    import env  # noqa: F401


def positive_int_from_env(name, default):
    """A positive integer from the environment, or ``default`` when unset or malformed."""
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logging.getLogger('emcap.settings').warning('%s=%r is not an integer, using %d', name, raw, default)
        return default


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django's signing helpers, which emcap never calls.
SECRET_KEY = os.environ.get('SECRET_KEY', 'emcap-batch-numerics')

DEBUG = 'DEVELOPMENT' in os.environ

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'numerics',
    'green',
    'spectrum',
    'waterfill',
    'sampled',
    'mercer',
    'bounds',
    'reports',
]

# Nothing is persisted
DATABASES = {}

USE_TZ = True


# Logging goes to stderr so CSV on stdout stays byte-identical

EMCAP_LOG_LEVEL = os.environ.get('EMCAP_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': EMCAP_LOG_LEVEL,
    },
}


# Parallelism
EMCAP_THREADS = positive_int_from_env('EMCAP_THREADS', 1)

# Wavenumber grids
EMCAP_SPECTRUM_SAMPLES = 4096
EMCAP_SPECTRUM_SPAN = 8
EMCAP_SPECTRUM_DECAY = 24
EMCAP_EDGE_TOLERANCE = 1e-8

# Brute-force Fourier oracle, in wavelengths
EMCAP_ORACLE_HALF_WIDTH = 100
EMCAP_ORACLE_TAPER = 40

# Water-filling
EMCAP_WATERFILL_MAX_ITER = 200

# Mercer expansion
EMCAP_MERCER_CUTOFF = 10000
EMCAP_MERCER_EIGEN_FLOOR = 1e-12

# Linear algebra tolerances
EMCAP_PSD_TOLERANCE = 1e-10
EMCAP_CONDITION_LIMIT = 1e12

# Source sampling doublings tried before a ResolutionWarning
EMCAP_SOURCE_REFINEMENTS = 4

# CSV output
EMCAP_CSV_DIGITS = 17
