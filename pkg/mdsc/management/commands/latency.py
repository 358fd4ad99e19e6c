from django.core.management.base import BaseCommand, CommandError

from mdsc.code_model import MDMappingSet
from mdsc.decoder import WindowedDecoder, latency_estimate
from mdsc.forms import LatencyForm, form_errors

from ._helpers import EXIT_VALIDATION, emit, exit_codes, resolve


class Command(BaseCommand):
    help = 'Latency bound of windowed decoding, optionally with the MD window structure of a code'

    def add_arguments(self, parser):
        parser.add_argument('--W', dest='W_D', type=int, required=True, help='Window size in replicas')
        parser.add_argument('--m', type=int, help='Memory (taken from --code when given)')
        parser.add_argument('--L', type=int, help='Coupling length (taken from --code when given)')
        parser.add_argument('--T-rec', dest='T_rec', type=float, default=1.0, help='Time to receive a whole frame')
        parser.add_argument('--T-dec', dest='T_dec', type=float, default=1.0, help='Time to block-decode a frame')
        parser.add_argument('--structure', action='store_true', help='List every MD window of the code')
        parser.add_argument('--code', help='Constituent code name')
        parser.add_argument('--md-map', dest='md_map', help='MD map fixture name')
        parser.add_argument('--file', dest='map_file', help='Mapping set JSON written by optimize --out')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        spec = md = None
        if options['code'] or options['md_map']:
            spec, md = resolve(options['code'], options['L'], options['md_map'], options['map_file'])
        params = {
            'W_D': options['W_D'],
            'm': options['m'] if options['m'] is not None else (spec.m if spec else None),
            'L': options['L'] if options['L'] is not None else (spec.L if spec else None),
            'T_rec': options['T_rec'],
            'T_dec': options['T_dec'],
        }
        form = LatencyForm(params)
        if not form.is_valid():
            raise CommandError(form_errors(form), returncode=EXIT_VALIDATION)
        cd = form.cleaned_data
        estimate = latency_estimate(cd['W_D'], cd['m'], cd['L'], cd['T_rec'], cd['T_dec'])
        payload = {**params, **estimate.to_dict()}
        lines = [
            f"W_D={cd['W_D']} m={cd['m']} L={cd['L']}: window latency {estimate.window_latency:.4f}, "
            f"bound {estimate.bound:.4f} ({estimate.factor:.4f} of block decoding)"
        ]

        if options['structure']:
            if spec is None:
                raise CommandError('--structure needs --code or --md-map', returncode=EXIT_VALIDATION)
            decoder = WindowedDecoder(spec, md or MDMappingSet.identity(spec, 1, 1), cd['W_D'])
            structure = decoder.structure()
            payload['windows'] = structure
            lines.append('window  col replicas  row replicas  local  window VNs  targeted  frozen  edges')
            for row in structure:
                lines.append(
                    f"{row['window']:6}  {str(tuple(row['col_replicas'])):>12}  {str(tuple(row['row_replicas'])):>12}  "
                    f"{len(row['local_windows']):5}  {row['window_vns']:10}  {row['targeted_vns']:8}  "
                    f"{row['frozen_vns']:6}  {row['edges']:5}"
                )
        emit(self, payload, options['json'], lines)
