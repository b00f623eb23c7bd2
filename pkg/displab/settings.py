"""
Django settings for the displab project.

The project has no web surface: Django provides the settings layer, the
management command that runs experiments, logging configuration and the
test runner.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Nothing is signed; Django still expects a key to be configured
SECRET_KEY = os.getenv('SECRET_KEY', 'displab-insecure-local-key')

DEBUG = os.getenv('DEBUG', 'False').lower() in ['true', '1', 'yes', 'on']

USE_TZ = True


# Application definition

INSTALLED_APPS = [
    'lab',
]


# Database
# Results are flat files; no database is configured.
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {}


# Experiment runner settings

# Sweep parallelism used when the command is run without --threads
DISPLAB_THREADS = int(os.getenv('DISPLAB_THREADS', '1'))

# Relative output paths in experiment configs are resolved against this directory
DISPLAB_OUTPUT_DIR = Path(os.getenv('DISPLAB_OUTPUT_DIR', str(BASE_DIR / 'results')))

DISPLAB_LOG_LEVEL = os.getenv('DISPLAB_LOG_LEVEL', 'INFO').upper()


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'lab': {
            'handlers': ['console'],
            'level': DISPLAB_LOG_LEVEL,
            'propagate': False,
        },
    },
}
