import logging

from django.apps import AppConfig
from django.core.exceptions import ImproperlyConfigured

logger = logging.getLogger(__name__)


class MdscConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mdsc'
    verbose_name = 'MD-SC code design'

    def ready(self):
        """Validate the bundled fixtures once, so a transcription error fails at startup"""
        from django.conf import settings

        from .exceptions import FixtureError
        from .registry import load_registry

        path = settings.MDSC_SETTINGS.get('FIXTURES_PATH')
        try:
            registry = load_registry(path)
        except (FixtureError, OSError) as exc:
            raise ImproperlyConfigured(f'code fixtures at {path} are unusable: {exc}') from exc
        logger.debug('fixtures ok: codes %s, maps %s', registry.names(), registry.map_names())
