import logging

from django.core.management.base import BaseCommand, CommandError

from mdsc.forms import OptimizeForm, form_errors
from mdsc.optimizer import build_solution_tree, random_md

from ._helpers import EXIT_VALIDATION, budget, emit, exit_codes, registry, write_json

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Build an MD mapping by tree search over relocation decisions'

    def add_arguments(self, parser):
        parser.add_argument('--code', required=True, help='Constituent code name')
        parser.add_argument('--L', type=int, help='Coupling length (defaults to the fixture value)')
        parser.add_argument('--k', type=int, required=True, help='Target cycle length')
        parser.add_argument('--L2', type=int, required=True, help='MD coupling length')
        parser.add_argument('--d', type=int, required=True, help='MD coupling depth')
        parser.add_argument('--T', type=int, required=True, help='MD coupling density (tree depth)')
        parser.add_argument('--seed', type=int, help='Seed for the final leaf choice')
        parser.add_argument('--width', type=int, help='Leaves kept per level')
        parser.add_argument('--out', help='Write the mapping set as JSON')
        parser.add_argument('--tree-out', dest='tree_out', help='Write every tree node as JSON')
        parser.add_argument('--sweep', action='store_true', help='Report the best active count at every density up to T')
        parser.add_argument('--random', choices=['shared', 'per-chain'], help='Draw a random map instead of searching')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        form = OptimizeForm({key: options[key] for key in OptimizeForm.base_fields}, registry=registry())
        if not form.is_valid():
            raise CommandError(form_errors(form), returncode=EXIT_VALIDATION)
        cd = form.cleaned_data
        spec = cd['spec']

        if options['random']:
            md = random_md(spec, cd['T'], cd['d'], cd['L2'], shared=options['random'] == 'shared', seed=cd['seed'])
            payload = {'code': cd['code'], 'random': options['random'], 'mapping': md.to_dict()}
            if options['out']:
                write_json(options['out'], md.to_dict())
            emit(self, payload, options['json'], [f"random {options['random']} map, density {cd['T']}"])
            return

        tree = build_solution_tree(spec, cd['k'], cd['L2'], cd['d'], cd['T'], width=cd['width'], budget=budget())
        leaf = tree.pick(cd['seed'])
        md = tree.mapping(leaf)
        levels = tree.levels()
        payload = {
            'code': cd['code'],
            'k': cd['k'],
            'L2': cd['L2'],
            'd': cd['d'],
            'T': cd['T'],
            'active': leaf.active,
            'density': md.density,
            'levels': [{'level': level, 'expanded': expanded, 'active': active} for level, expanded, active in levels],
            'mapping': md.to_dict(),
        }
        lines = ['level  expanded  active']
        lines += [f'{level:5}  {expanded:8}  {active:6}' for level, expanded, active in levels]
        if options['sweep']:
            # the level of a node equals the density of its map
            payload['sweep'] = [{'T': level, 'active': active} for level, _, active in levels]
            lines.append('density sweep: ' + ', '.join(f'T={level}:{active}' for level, _, active in levels))
        lines.append(f"final: {leaf.active} active cycles-{cd['k']} at density {md.density}")
        if leaf.level < cd['T']:
            logger.info('search stopped at level %d of %d', leaf.level, cd['T'])
        if options['out']:
            write_json(options['out'], md.to_dict())
        if options['tree_out']:
            write_json(options['tree_out'], tree.to_dict())
        emit(self, payload, options['json'], lines)
