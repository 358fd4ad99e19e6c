"""
Django settings for CodeDesign_project project.

Environment-specific values are read with python-decouple; everything the code design
toolkit itself tunes lives in MDSC_SETTINGS.
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-mdsc-local-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=lambda v: [h.strip() for h in v.split(',') if h.strip()])


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'mdsc',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'CodeDesign_project.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'CodeDesign_project.wsgi.application'


# Database

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (admin only)

STATIC_URL = '/static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
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
        'mdsc': {
            'handlers': ['console'],
            'level': config('MDSC_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}

# Code design settings
MDSC_SETTINGS = {
    'SIGNATURE_BUDGET': 10 ** 7,       # closed walks enumerated before giving up
    'TREE_WIDTH': 64,                  # surviving leaves per optimizer level
    'DENSE_EXPORT_LIMIT': 10 ** 6,     # entries in a dense-text export
    'BRUTE_FORCE_NODE_LIMIT': 5000,    # Tanner graph nodes for the DFS oracle
    'DECODER': {
        'MAX_ITERATIONS': 15,
        'BITS': 4,
        'STEP': 0.5,
        'EARLY_STOP': True,
    },
    'SIMULATION': {
        'MIN_BIT_ERRORS': 100,
        'MAX_FRAMES': 10 ** 6,
        'CHUNK_FRAMES': 32,            # fixed chunking keeps results independent of WORKERS
    },
    'WORKERS': config('MDSC_WORKERS', default=1, cast=int),
    'FIXTURES_PATH': BASE_DIR / 'mdsc' / 'data' / 'codes.json',
}

# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
