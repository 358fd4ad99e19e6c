import functools
import json
import logging
from pathlib import Path

from django.core.management.base import CommandError

from mdsc.code_model import MDMappingSet
from mdsc.exceptions import ResourceCapExceeded, SpecValidationError
from mdsc.forms import mdsc_settings
from mdsc.registry import load_registry

logger = logging.getLogger('mdsc.commands')

EXIT_VALIDATION = 2
EXIT_RESOURCE_CAP = 3
EXIT_IO = 4


def exit_codes(handle):
    """Turn domain errors raised by a command into CommandError with the matching exit code"""

    @functools.wraps(handle)
    def wrapper(self, *args, **options):
        try:
            return handle(self, *args, **options)
        except CommandError:
            raise
        except SpecValidationError as e:
            raise CommandError(str(e), returncode=EXIT_VALIDATION) from e
        except ResourceCapExceeded as e:
            raise CommandError(str(e), returncode=EXIT_RESOURCE_CAP) from e
        except OSError as e:
            raise CommandError(f'I/O error: {e}', returncode=EXIT_IO) from e

    return wrapper


def registry():
    return load_registry(mdsc_settings().get('FIXTURES_PATH'))


def budget():
    return mdsc_settings().get('SIGNATURE_BUDGET', 10 ** 7)


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SpecValidationError(f'{path} is not valid JSON: {e}') from e


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2))
    logger.info('wrote %s', path)


def resolve(code=None, L=None, md_map=None, map_file=None):
    """
    Code spec and optional mapping set for the usual ``--code/--L/--md-map/--file`` flags.

    A map fixture carries its own code and coupling length; ``--code`` must agree with it.
    """
    fixtures = registry()
    if md_map and map_file:
        raise SpecValidationError('give either --md-map or --file, not both')
    if md_map:
        owner = fixtures.map_code(md_map)
        if code and code != owner:
            raise SpecValidationError(f'map {md_map} belongs to code {owner}, not {code}')
        spec, md = fixtures.mapping(md_map)
        if L is not None and L != spec.L:
            spec = spec.with_length(L)
        return spec, md
    if not code:
        raise SpecValidationError('--code is required unless --md-map names a map fixture')
    spec = fixtures.code(code, L)
    md = None
    if map_file:
        md = MDMappingSet.from_dict(read_json(map_file))
        md.check_against(spec)
    return spec, md


def emit(command, payload, as_json, lines):
    if as_json:
        command.stdout.write(json.dumps(payload, indent=2))
    else:
        for line in lines:
            command.stdout.write(line)
