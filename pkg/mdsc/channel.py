"""
AWGN/BPSK Monte Carlo harness.

The all-zero codeword is sent as +1 symbols. Frame ``f`` of SNR point ``p`` draws its
noise from a Philox stream keyed by ``(seed, p, f)``, so any frame can be replayed on
its own and the outcome of a plan does not depend on how many workers run it.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from scipy.stats import binomtest

from .code_model import MDMappingSet, assemble_md, assemble_sc
from .decoder import DecodeConfig, MinSumDecoder, WindowedDecoder
from .exceptions import SpecValidationError
from .registry import load_registry

logger = logging.getLogger(__name__)

MODES = ('block', 'windowed', 'md-windowed')
CSV_COLUMNS = ['snr_db', 'frames', 'bit_errors', 'frame_errors', 'ber', 'fer']
DEFAULT_CHUNK_FRAMES = 32


@dataclass(frozen=True)
class SimPlan:
    code: str
    snr_db: tuple
    L: Optional[int] = None
    md_map: object = None
    max_frames: int = 10 ** 6
    min_bit_errors: int = 100
    seed: int = 0
    decoder: DecodeConfig = DecodeConfig()
    mode: str = 'block'
    window: Optional[int] = None
    snr_convention: str = 'EbN0'

    def __post_init__(self):
        object.__setattr__(self, 'snr_db', tuple(float(s) for s in self.snr_db))
        if not self.snr_db:
            raise SpecValidationError('plan needs at least one SNR point')
        if self.max_frames < 1:
            raise SpecValidationError(f'max_frames must be >= 1, got {self.max_frames}')
        if self.min_bit_errors < 0:
            raise SpecValidationError(f'min_bit_errors must be >= 0, got {self.min_bit_errors}')
        if self.mode not in MODES:
            raise SpecValidationError(f'unknown decoder mode {self.mode!r}; choose from {", ".join(MODES)}')
        if self.mode != 'block' and self.window is None:
            raise SpecValidationError(f'{self.mode} decoding needs a window size')
        if self.mode == 'md-windowed' and self.md_map is None:
            raise SpecValidationError('md-windowed decoding needs an MD map')
        if self.mode == 'windowed' and self.md_map is not None:
            raise SpecValidationError('windowed decoding applies to a single SC chain; use md-windowed')
        if self.snr_convention != 'EbN0':
            raise SpecValidationError(f'unsupported SNR convention {self.snr_convention!r}')

    def to_dict(self):
        data = asdict(self)
        data['snr_db'] = list(self.snr_db)
        data['decoder'] = self.decoder.to_dict()
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            decoder = data.pop('decoder', None) or {}
            return cls(decoder=DecodeConfig(**decoder), **data)
        except TypeError as exc:
            raise SpecValidationError(f'malformed simulation plan: {exc}') from exc

    @property
    def plan_hash(self):
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    length: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ber(self):
        return self.bit_errors / (self.frames * self.length) if self.frames else 0.0

    @property
    def fer(self):
        return self.frame_errors / self.frames if self.frames else 0.0

    def ber_interval(self, confidence=0.95):
        """Clopper-Pearson interval on the bit error rate"""
        trials = self.frames * self.length
        if not trials:
            return 0.0, 1.0
        ci = binomtest(self.bit_errors, trials).proportion_ci(confidence_level=confidence, method='exact')
        return ci.low, ci.high

    def fer_interval(self, confidence=0.95):
        if not self.frames:
            return 0.0, 1.0
        ci = binomtest(self.frame_errors, self.frames).proportion_ci(confidence_level=confidence, method='exact')
        return ci.low, ci.high

    def to_dict(self):
        data = asdict(self)
        data.update(ber=self.ber, fer=self.fer)
        return data

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                snr_db=float(data['snr_db']), frames=int(data['frames']), bit_errors=int(data['bit_errors']),
                frame_errors=int(data['frame_errors']), length=int(data['length']),
                wall_time=float(data.get('wall_time', 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecValidationError(f'malformed BER record: {exc!r}') from exc


def noise_variance(ebn0_db, rate):
    return 1.0 / (2.0 * rate * 10 ** (ebn0_db / 10.0))


def frame_llr(seed, point, frame, n, sigma2):
    """Channel LLRs of one all-zero frame; reproducible from its coordinates alone"""
    key = np.random.SeedSequence([seed, point, frame]).generate_state(2, np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    received = 1.0 + math.sqrt(sigma2) * rng.standard_normal(n)
    return 2.0 * received / sigma2


def resolve_code(plan, registry=None):
    registry = registry or load_registry()
    spec = registry.code(plan.code, plan.L)
    md = None
    if isinstance(plan.md_map, str):
        _, md = registry.mapping(plan.md_map)
    elif plan.md_map is not None:
        md = MDMappingSet.from_dict(plan.md_map)
    if md is not None:
        md.check_against(spec)
    return spec, md


def build_decoder(plan, spec, md):
    """Return ``(decode function, code length)`` for the plan's decoder mode"""
    cfg = plan.decoder
    if plan.mode == 'block':
        H = assemble_md(spec, md) if md is not None else assemble_sc(spec)
        decoder = MinSumDecoder(H, cfg)
        return (lambda llr: decoder.decode(llr).bits), H.n_cols
    mapping = md if md is not None else MDMappingSet.identity(spec, 1, 1)
    windowed = WindowedDecoder(spec, mapping, plan.window, cfg)
    return windowed.decode, windowed.H.n_cols


_WORKER = {}


def _init_worker(plan_data, fixtures):
    plan = SimPlan.from_dict(plan_data)
    spec, md = resolve_code(plan, load_registry(fixtures))
    decode, n = build_decoder(plan, spec, md)
    _WORKER.update(plan=plan, decode=decode, n=n, rate=spec.design_rate)


def _run_chunk(task):
    point, snr, start, count = task
    plan = _WORKER['plan']
    n = _WORKER['n']
    sigma2 = noise_variance(snr, _WORKER['rate'])
    bit_errors = frame_errors = 0
    for frame in range(start, start + count):
        bits = _WORKER['decode'](frame_llr(plan.seed, point, frame, n, sigma2))
        errors = int(np.count_nonzero(bits))
        bit_errors += errors
        frame_errors += errors > 0
    return bit_errors, frame_errors, count


def _read_checkpoint(path, plan_hash):
    if not path or not Path(path).exists():
        return {}
    try:
        state = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f'{path} is not a valid checkpoint: {exc}') from exc
    if not isinstance(state, dict):
        raise SpecValidationError(f'{path} is not a valid checkpoint: expected a JSON object')
    if state.get('plan_hash') != plan_hash:
        logger.warning('checkpoint %s belongs to another plan; starting over', path)
        return {}
    logger.info('resuming from checkpoint %s', path)
    return state.get('points', {})


def _write_checkpoint(path, plan_hash, points):
    if path:
        Path(path).write_text(json.dumps({'plan_hash': plan_hash, 'points': points}, indent=2))


def _finished(progress, plan):
    if progress['frames'] >= plan.max_frames:
        return True
    return progress['frames'] > 0 and progress['bit_errors'] >= plan.min_bit_errors


def simulate(plan: SimPlan, workers=1, chunk_frames=DEFAULT_CHUNK_FRAMES, checkpoint=None, on_point=None, fixtures=None):
    """Run every SNR point of the plan; ``on_point`` sees each record as it completes"""
    if chunk_frames < 1:
        raise SpecValidationError(f'chunk_frames must be >= 1, got {chunk_frames}')
    plan_hash = plan.plan_hash
    points = _read_checkpoint(checkpoint, plan_hash)
    fixtures = str(fixtures) if fixtures else None

    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(plan.to_dict(), fixtures))
    else:
        _init_worker(plan.to_dict(), fixtures)
    length = None
    records = []
    try:
        for index, snr in enumerate(plan.snr_db):
            progress = points.setdefault(str(index), {
                'frames': 0, 'bit_errors': 0, 'frame_errors': 0, 'wall_time': 0.0, 'done': False,
            })
            started = time.perf_counter() - progress['wall_time']
            while not progress['done'] and not _finished(progress, plan):
                tasks = []
                start = progress['frames']
                for _ in range(max(workers, 1)):
                    if start >= plan.max_frames:
                        break
                    count = min(chunk_frames, plan.max_frames - start)
                    tasks.append((index, snr, start, count))
                    start += count
                results = pool.map(_run_chunk, tasks) if pool else map(_run_chunk, tasks)
                # chunks are folded in order so the stopping frame never depends on the pool size
                for bit_errors, frame_errors, count in results:
                    if _finished(progress, plan):
                        break
                    progress['frames'] += count
                    progress['bit_errors'] += bit_errors
                    progress['frame_errors'] += frame_errors
                progress['wall_time'] = time.perf_counter() - started
                _write_checkpoint(checkpoint, plan_hash, points)
            if length is None:
                length = _code_length(plan, fixtures, pool)
            fresh = not progress['done']
            progress['done'] = True
            _write_checkpoint(checkpoint, plan_hash, points)
            record = BerRecord(
                snr_db=snr, frames=progress['frames'], bit_errors=progress['bit_errors'],
                frame_errors=progress['frame_errors'], length=length, wall_time=progress['wall_time'],
            )
            records.append(record)
            logger.info('%.2f dB: %d frames, BER %.3e, FER %.3e', snr, record.frames, record.ber, record.fer)
            if on_point and fresh:
                on_point(record)
    finally:
        if pool:
            pool.shutdown()
    flag_inversions(records)
    return records


def _code_length(plan, fixtures, pool):
    if not pool:
        return _WORKER['n']
    spec, md = resolve_code(plan, load_registry(fixtures))
    return spec.length * (md.L2 if md is not None else 1)


def flag_inversions(records, sigmas=3.0):
    """SNR pairs whose BER rises by more than ``sigmas`` standard errors"""
    flagged = []
    ordered = sorted(records, key=lambda r: r.snr_db)
    for low, high in zip(ordered, ordered[1:]):
        spread = 0.0
        for record in (low, high):
            trials = record.frames * record.length
            if trials:
                spread += record.ber * (1 - record.ber) / trials
        if high.ber - low.ber > sigmas * math.sqrt(spread):
            logger.warning('BER rises from %.3e at %.2f dB to %.3e at %.2f dB', low.ber, low.snr_db, high.ber, high.snr_db)
            flagged.append((low.snr_db, high.snr_db))
    return flagged


def curve_frame(records):
    frame = pd.DataFrame([{column: record.to_dict()[column] for column in CSV_COLUMNS} for record in records], columns=CSV_COLUMNS)
    return frame.sort_values('snr_db', kind='stable').reset_index(drop=True)


def emit_curve(records, path, fmt='csv'):
    path = Path(path)
    if fmt == 'csv':
        curve_frame(records).to_csv(path, index=False)
    elif fmt == 'json':
        path.write_text(json.dumps([record.to_dict() for record in records], indent=2))
    else:
        raise SpecValidationError(f'unsupported curve format {fmt!r}; choose csv or json')
    logger.info('wrote %d BER points to %s', len(records), path)
    return path


def load_curve(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f'{path} is not a JSON curve: {exc}') from exc
    return [BerRecord.from_dict(item) for item in data]
