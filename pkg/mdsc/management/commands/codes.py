from django.core.management.base import BaseCommand, CommandError

from ._helpers import EXIT_VALIDATION, emit, exit_codes, registry


class Command(BaseCommand):
    help = 'List the bundled codes and map fixtures, or show one code'

    def add_arguments(self, parser):
        parser.add_argument('action', choices=['list', 'show'])
        parser.add_argument('name', nargs='?', help='Code name for show')
        parser.add_argument('--L', type=int, help='Coupling length (defaults to the fixture value)')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        fixtures = registry()
        if options['action'] == 'list':
            codes = [fixtures.describe(name) for name in fixtures.names()]
            payload = {'codes': codes, 'maps': fixtures.map_names()}
            lines = [
                f"{c['name']:6} {c['title']:18} gamma={c['spec']['gamma']} kappa={c['spec']['kappa']} "
                f"z={c['spec']['z']} m={c['spec']['m']} L in {c['lengths']}"
                for c in codes
            ]
            lines.append(f"maps: {', '.join(payload['maps'])}")
            emit(self, payload, options['json'], lines)
            return

        if not options['name']:
            raise CommandError('show needs a code name', returncode=EXIT_VALIDATION)
        info = fixtures.describe(options['name'], options['L'])
        spec = info['spec']
        lines = [
            f"{info['name']} ({info['title']})",
            f"gamma={spec['gamma']} kappa={spec['kappa']} z={spec['z']} m={spec['m']} L={spec['L']}",
            f"length {info['length']}, design rate {info['rate']:.4f}",
        ]
        emit(self, info, options['json'], lines)
