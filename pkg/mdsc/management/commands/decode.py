from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand

from mdsc.channel import MODES
from mdsc.code_model import MDMappingSet, assemble_md, assemble_sc
from mdsc.decoder import DecodeConfig, WindowedDecoder, min_sum_decode
from mdsc.exceptions import SpecValidationError
from mdsc.exports import read_matrix
from mdsc.forms import mdsc_settings

from ._helpers import emit, exit_codes, resolve


def read_llr(path):
    path = Path(path)
    if path.suffix == '.npy':
        return np.load(path)
    try:
        return np.loadtxt(path, dtype=np.float64, ndmin=1)
    except ValueError as e:
        raise SpecValidationError(f'{path} does not hold channel values: {e}') from e


class Command(BaseCommand):
    help = 'Decode one frame of channel LLRs'

    def add_arguments(self, parser):
        parser.add_argument('--matrix', help='Parity-check matrix file (alist, .mtx or dense text)')
        parser.add_argument('--matrix-format', dest='matrix_format', help='Matrix format if the suffix does not tell')
        parser.add_argument('--code', help='Constituent code name, instead of --matrix')
        parser.add_argument('--L', type=int, help='Coupling length (defaults to the fixture value)')
        parser.add_argument('--md-map', dest='md_map', help='MD map fixture name')
        parser.add_argument('--file', dest='map_file', help='Mapping set JSON written by optimize --out')
        parser.add_argument('--llr-file', dest='llr_file', required=True, help='Channel LLRs, text or .npy')
        parser.add_argument('--mode', choices=MODES, default='block')
        parser.add_argument('--window', type=int, help='Window size for windowed modes')
        parser.add_argument('--iterations', type=int, help='Maximum decoder iterations')
        parser.add_argument('--bits', type=int, help='Message quantizer width')
        parser.add_argument('--out', help='Write the hard decisions, one per line')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        base = DecodeConfig.from_settings(mdsc_settings().get('DECODER', {})).to_dict()
        if options['iterations']:
            base['max_iterations'] = options['iterations']
        if options['bits']:
            base['bits'] = options['bits']
        cfg = DecodeConfig(**base)
        llr = read_llr(options['llr_file'])
        mode = options['mode']

        if options['matrix']:
            if mode != 'block':
                raise SpecValidationError('windowed decoding needs --code/--md-map rather than a bare matrix')
            H = read_matrix(options['matrix'], options['matrix_format'])
            result = min_sum_decode(H, llr, cfg)
            bits, converged, iterations = result.bits, result.converged, result.iterations
        else:
            spec, md = resolve(options['code'], options['L'], options['md_map'], options['map_file'])
            if mode == 'block':
                H = assemble_md(spec, md) if md is not None else assemble_sc(spec)
                result = min_sum_decode(H, llr, cfg)
                bits, converged, iterations = result.bits, result.converged, result.iterations
            else:
                if options['window'] is None:
                    raise SpecValidationError(f'{mode} decoding needs --window')
                if mode == 'windowed' and md is not None:
                    raise SpecValidationError('windowed decoding applies to a single SC chain; use md-windowed')
                if mode == 'md-windowed' and md is None:
                    raise SpecValidationError('md-windowed decoding needs an MD map')
                decoder = WindowedDecoder(spec, md or MDMappingSet.identity(spec, 1, 1), options['window'], cfg)
                H = decoder.H
                bits = decoder.decode(llr)
                converged, iterations = not H.syndrome(bits).any(), None

        syndrome_weight = int(H.syndrome(bits).sum())
        if options['out']:
            np.savetxt(options['out'], bits, fmt='%d')
        payload = {
            'mode': mode,
            'length': int(bits.size),
            'converged': bool(converged),
            'iterations': iterations,
            'syndrome_weight': syndrome_weight,
            'ones': int(np.count_nonzero(bits)),
        }
        lines = [
            f"{mode} decoding of {bits.size} bits: {'converged' if converged else 'not converged'}"
            + (f' after {iterations} iterations' if iterations is not None else ''),
            f'syndrome weight {syndrome_weight}, {payload["ones"]} ones',
        ]
        emit(self, payload, options['json'], lines)
