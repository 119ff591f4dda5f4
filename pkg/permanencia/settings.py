"""
Django settings for permanencia project.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Cargar las variables del archivo .env
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.getenv('SECRET_KEY', 'permanencia-solo-local')

DEBUG = os.getenv('DEBUG', '') in ('1', 'true', 'True')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'conmutacion',
]

# Sin base de datos: todo el cálculo es en memoria.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'es-cl'

TIME_ZONE = 'America/Santiago'

USE_I18N = True

USE_TZ = True


# Logging

LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'conmutacion': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Parámetros numéricos por defecto (los escenarios y flags de CLI los sobreescriben)
CONMUTACION = {
    'PASO': 1e-3,
    'SEMILLA': 42,
    'TOL_PERTENENCIA': 1e-9,
    'MUESTRAS': 10000,
    'MARGEN_GLOBAL': 0.01,
    'I_MAX': 20,
    'PUNTOS_FRONTERA': 16,
}
