"""
Django settings for reverse_amgm project.

The project has no web surface: it hosts the ``operator_means`` app, whose
management commands are the command-line front door of the library.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

DEBUG = os.environ.get('DEBUG', 'False').lower() == 'true'

# Nothing is signed or served; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('SECRET_KEY', 'reverse-amgm-local-only')


# Application definition

INSTALLED_APPS = [
    'operator_means',
]

# No persistence: every result is recomputed from its inputs.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging Configuration
# Logs go to stderr so that `--json` output on stdout stays machine-readable.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.environ.get('AMGM_LOG_LEVEL', 'WARNING').upper(),
    },
    'loggers': {
        'operator_means': {
            'handlers': ['console'],
            'level': os.environ.get('AMGM_LOG_LEVEL', 'WARNING').upper(),
            'propagate': False,
        },
    },
}


# Numerical policy for the operator_means app.
# Environment overrides are parsed here and nowhere else.
OPERATOR_MEANS = {
    # Loewner comparisons: B - A >= 0 is accepted when
    # lambda_min(B - A) >= -TOLERANCE * max(1, ||A||, ||B||)
    'TOLERANCE': float(os.environ.get('AMGM_TOLERANCE', '1e-9')),
    # Cyclic Jacobi: stop when off(A)_F <= JACOBI_TOL * ||A||_F
    'JACOBI_TOL': 1e-14,
    'JACOBI_MAX_SWEEPS': 100,
    # Fractional/negative powers need lambda_min > CONDITION_FLOOR * lambda_max
    'CONDITION_FLOOR': 1e-12,
    # Matrix JSON reader rejects ||X - X^T||_F > SYMMETRY_TOL * ||X||_F
    'SYMMETRY_TOL': 1e-8,
    'UNITAL_TOL': 1e-12,
    'POSITIVITY_TOL': 1e-10,
    # Absolute tolerance for the scalar Young identity at nu = 1/2
    'SCALAR_EQUALITY_TOL': 1e-12,
    'DEFAULT_SEED': int(os.environ.get('AMGM_SEED', '42')),
    'DEFAULT_TRIALS': 1000,
    # Suite worker processes; reports do not depend on this
    'WORKERS': int(os.environ.get('AMGM_WORKERS', os.cpu_count() or 1)),
}
