"""
Django settings for grammar_coverage project.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# No web surface; the key only satisfies Django's startup checks.
SECRET_KEY = os.getenv('SECRET_KEY', 'grammar-coverage-local-key')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Local apps
    'covergen',
]

# Everything lives in memory; no database is used
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Bundled grammars (resolved by bare file name from the command line)
COVERGEN_GRAMMAR_DIR = BASE_DIR / 'covergen' / 'fixtures' / 'grammars'

# Validation: warn when a right-hand side holds more non-terminals than this
COVERGEN_MAX_RHS_NONTERMINALS = int(os.getenv('COVERGEN_MAX_RHS_NONTERMINALS', '8'))

# Severity of rules whose right-hand side is a single non-terminal: 'warn' or 'error'
COVERGEN_UNIT_RULES = os.getenv('COVERGEN_UNIT_RULES', 'warn')

# Largest size the exhaustive enumerator accepts
COVERGEN_ORACLE_CAP = int(os.getenv('COVERGEN_ORACLE_CAP', '14'))

# Linear program arithmetic: 'rational' (exact) or 'float'
COVERGEN_LP_MODE = os.getenv('COVERGEN_LP_MODE', 'rational')
COVERGEN_FLOAT_TOLERANCE = float(os.getenv('COVERGEN_FLOAT_TOLERANCE', '1e-9'))

# Excluded symbols: look for the smallest coverable size up to factor * n
COVERGEN_EXCLUSION_SCAN_FACTOR = int(os.getenv('COVERGEN_EXCLUSION_SCAN_FACTOR', '4'))

# Sampling
COVERGEN_DEFAULT_SEED = int(os.getenv('COVERGEN_DEFAULT_SEED', '0'))
COVERGEN_WORKERS = int(os.getenv('COVERGEN_WORKERS', '1'))

# Logging goes to stderr only; stdout carries the output document
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'covergen': {
            'handlers': ['console'],
            'level': os.getenv('COVERGEN_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
