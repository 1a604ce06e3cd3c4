"""
Django settings for the deformation project.

The project declares no database, no URLs and no middleware: it is driven by
the `quantize` management command and the test runner.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get(
    "SECRET_KEY",
    "django-insecure-deformation-workbench-local-key",
)

DEBUG = os.environ.get("DEBUG", "False") == "True"

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "polynomials",
    "multivectors",
    "cochains",
    "stars",
    "obstructions",
    "workbench",
]

DATABASES = {}

USE_TZ = True

# Solver bounds and seeds; CLI flags take precedence
QUANTIZE_DEGREE_BOUND = int(os.environ.get("QUANTIZE_DEGREE_BOUND", "2"))
QUANTIZE_OP_ORDER_BOUND = int(os.environ.get("QUANTIZE_OP_ORDER_BOUND", "2"))
QUANTIZE_SEED = int(os.environ.get("QUANTIZE_SEED", "0"))
QUANTIZE_LOG_LEVEL = os.environ.get("QUANTIZE_LOG_LEVEL", "WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        app: {"handlers": ["console"], "level": QUANTIZE_LOG_LEVEL, "propagate": False}
        for app in INSTALLED_APPS
    },
}
