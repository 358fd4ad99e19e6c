from django.core.management.base import BaseCommand

from mdsc.code_model import assemble_md, assemble_sc
from mdsc.exports import FORMATS, format_for_path, write_matrix
from mdsc.forms import mdsc_settings

from ._helpers import emit, exit_codes, resolve


class Command(BaseCommand):
    help = 'Assemble the parity-check matrix of an SC or MD-SC code and export it'

    def add_arguments(self, parser):
        parser.add_argument('--code', help='Constituent code name')
        parser.add_argument('--L', type=int, help='Coupling length (defaults to the fixture value)')
        parser.add_argument('--md-map', dest='md_map', help='MD map fixture name')
        parser.add_argument('--file', dest='map_file', help='Mapping set JSON written by optimize --out')
        parser.add_argument('--format', choices=FORMATS, help='Export format (guessed from --out otherwise)')
        parser.add_argument('--out', required=True, help='Output path')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        spec, md = resolve(options['code'], options['L'], options['md_map'], options['map_file'])
        H = assemble_md(spec, md) if md is not None else assemble_sc(spec)
        fmt = format_for_path(options['out'], options['format'])
        write_matrix(options['out'], H, fmt, dense_limit=mdsc_settings().get('DENSE_EXPORT_LIMIT', 10 ** 6))
        payload = {'out': options['out'], 'format': fmt, 'rows': H.n_rows, 'cols': H.n_cols, 'edges': H.nnz}
        emit(self, payload, options['json'], [f'{H.n_rows} x {H.n_cols} matrix, {H.nnz} ones, written to {options["out"]} ({fmt})'])
