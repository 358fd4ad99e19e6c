from django.core.management.base import BaseCommand

from mdsc.code_model import assemble_md, assemble_sc
from mdsc.cycles import brute_force_count, classify_active, count_cycles, lifted_count, middle_replica_catalog
from mdsc.forms import mdsc_settings
from mdsc.optimizer import predict_md_cycles, random_md

from ._helpers import budget, emit, exit_codes, resolve


class Command(BaseCommand):
    help = 'Count cycles of length k in an SC code or an MD-SC code'

    def add_arguments(self, parser):
        parser.add_argument('--code', help='Constituent code name')
        parser.add_argument('--L', type=int, help='Coupling length (defaults to the fixture value)')
        parser.add_argument('--md-map', dest='md_map', help='MD map fixture name')
        parser.add_argument('--file', dest='map_file', help='Mapping set JSON written by optimize --out')
        parser.add_argument('--k', type=int, required=True, help='Cycle length')
        parser.add_argument('--random', choices=['shared', 'per-chain'], help='Count on a random MD map instead')
        parser.add_argument('--T', type=int, default=0, help='Density of the random map')
        parser.add_argument('--d', type=int, default=2, help='Depth of the random map')
        parser.add_argument('--L2', type=int, default=2, help='MD coupling length of the random map')
        parser.add_argument('--seed', type=int, help='Seed of the random map')
        parser.add_argument('--brute-force', dest='brute_force', action='store_true',
                            help='Also count by DFS on the lifted graph (small codes only)')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        spec, md = resolve(options['code'], options['L'], options['md_map'], options['map_file'])
        if options['random']:
            md = random_md(spec, options['T'], options['d'], options['L2'],
                           shared=options['random'] == 'shared', seed=options['seed'])
        k = options['k']
        cap = budget()

        total = count_cycles(spec, k, md=md, budget=cap)
        payload = {
            'code': options['code'] or options['md_map'],
            'L': spec.L,
            'k': k,
            'length': spec.length * (md.L2 if md else 1),
            'total': total,
        }
        lines = [f"cycles-{k}: {total}  (length {payload['length']})"]
        if md is not None and md.is_uniform:
            catalog = middle_replica_catalog(spec, k, budget=cap)
            active, _ = classify_active(catalog, md, spec.gamma, spec.kappa)
            predicted = predict_md_cycles(spec, k, md, budget=cap)
            payload.update(middle=len(catalog), active=len(active), active_lifted=lifted_count(active, spec.z), predicted={str(n): c for n, c in predicted.items()})
            lines.append(f"active cycles-{k} through the middle replica: {len(active)} of {len(catalog)}")
            lines.append(f"active lifted cycles-{k} per chain and replica: {payload['active_lifted']}")
            lines.append('predicted spectrum: ' + ', '.join(f'{c} of length {n}' for n, c in predicted.items()))
        if md is not None:
            payload['mapping'] = md.to_dict()
        if options['brute_force']:
            H = assemble_md(spec, md) if md is not None else assemble_sc(spec)
            payload['brute_force'] = brute_force_count(H, k, mdsc_settings().get('BRUTE_FORCE_NODE_LIMIT', 5000))
            lines.append(f"brute force: {payload['brute_force']}")
        emit(self, payload, options['json'], lines)
