"""
Quantized min-sum decoding with block, windowed and MD-windowed schedules.

Messages live on an integer grid: a value ``q`` stands for ``q * step`` and saturates
at ``+-(2**(bits-1) - 1)``. Bit ``j`` of an MD-SC code is ordered chain-major, then by
column replica, column group and intra-circulant offset.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .code_model import MDMappingSet, SparseBinaryMatrix, assemble_md
from .exceptions import SpecValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecodeConfig:
    max_iterations: int = 15
    bits: int = 4
    step: float = 0.5
    early_stop: bool = True

    def __post_init__(self):
        if self.bits < 2:
            raise SpecValidationError(f'quantizer needs at least 2 bits, got {self.bits}')
        if self.step <= 0:
            raise SpecValidationError(f'quantizer step must be positive, got {self.step}')
        if self.max_iterations < 1:
            raise SpecValidationError(f'max_iterations must be >= 1, got {self.max_iterations}')

    @property
    def levels(self):
        return 2 ** (self.bits - 1) - 1

    @property
    def clip(self):
        return self.levels * self.step

    def quantize(self, values):
        q = np.rint(np.asarray(values, dtype=np.float64) / self.step)
        return np.clip(q, -self.levels, self.levels).astype(np.int64)

    @classmethod
    def from_settings(cls, options):
        return cls(
            max_iterations=int(options.get('MAX_ITERATIONS', 15)),
            bits=int(options.get('BITS', 4)),
            step=float(options.get('STEP', 0.5)),
            early_stop=bool(options.get('EARLY_STOP', True)),
        )

    def to_dict(self):
        return {'max_iterations': self.max_iterations, 'bits': self.bits, 'step': self.step, 'early_stop': self.early_stop}


class DecodeResult(NamedTuple):
    bits: np.ndarray
    converged: bool
    iterations: int
    posterior: np.ndarray


class MinSumDecoder:
    """Flooding min-sum over a fixed parity-check matrix"""

    def __init__(self, H: SparseBinaryMatrix, cfg: DecodeConfig):
        self.H = H
        self.cfg = cfg
        csr = H.csr
        weights = np.diff(csr.indptr)
        self.edge_cols = csr.indices.astype(np.int64)
        filled = weights > 0
        self.starts = csr.indptr[:-1][filled].astype(np.int64)
        # compact check index of each edge, empty rows skipped
        self.edge_checks = np.repeat(np.arange(int(filled.sum())), weights[filled])
        self.n = H.n_cols

    def decode(self, llr, frozen=None) -> DecodeResult:
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.n,):
            raise SpecValidationError(f'expected {self.n} channel values, got {llr.shape}')
        cfg = self.cfg
        Q = cfg.levels
        channel = cfg.quantize(llr)
        v2c = channel[self.edge_cols]
        frozen_edges = None
        if frozen is not None:
            frozen_edges = np.asarray(frozen, dtype=bool)[self.edge_cols]

        bits = (channel < 0).astype(np.int8)
        posterior = channel.copy()
        converged = False
        iterations = 0
        if self.edge_cols.size == 0:
            return DecodeResult(bits, True, 0, posterior)

        for iterations in range(1, cfg.max_iterations + 1):
            c2v = self._check_update(v2c, Q)
            incoming = np.bincount(self.edge_cols, weights=c2v, minlength=self.n)
            posterior = channel + np.rint(incoming).astype(np.int64)
            v2c = np.clip(posterior[self.edge_cols] - c2v, -Q, Q)
            if frozen_edges is not None:
                v2c = np.where(frozen_edges, channel[self.edge_cols], v2c)
            bits = (posterior < 0).astype(np.int8)
            if not self.H.syndrome(bits).any():
                converged = True
                if cfg.early_stop:
                    break
        return DecodeResult(bits, converged, iterations, posterior)

    def _check_update(self, v2c, Q):
        mags = np.abs(v2c)
        negative = (v2c < 0).astype(np.int64)
        checks = self.edge_checks

        min1 = np.minimum.reduceat(mags, self.starts)
        is_min = mags == min1[checks]
        hits = np.flatnonzero(is_min)
        first = hits[np.r_[True, checks[hits][1:] != checks[hits][:-1]]]
        masked = mags.copy()
        # a degree-1 check has no extrinsic input and saturates
        masked[first] = Q
        min2 = np.minimum.reduceat(masked, self.starts)

        magnitude = min1[checks].copy()
        magnitude[first] = min2[checks[first]]
        parity = np.add.reduceat(negative, self.starts) % 2
        sign = parity[checks] ^ negative
        return np.where(sign == 1, -magnitude, magnitude)


def min_sum_decode(H: SparseBinaryMatrix, llr, cfg: DecodeConfig = DecodeConfig(), frozen=None) -> DecodeResult:
    return MinSumDecoder(H, cfg).decode(llr, frozen=frozen)


@dataclass(frozen=True)
class LocalWindow:
    chain: int
    depth: int
    segment: tuple
    replicas: tuple

    def to_dict(self):
        return {'chain': self.chain, 'depth': self.depth, 'segment': list(self.segment), 'replicas': list(self.replicas)}


@dataclass(frozen=True)
class WindowConfiguration:
    index: int
    col_replicas: tuple
    row_replicas: tuple
    frozen_replicas: tuple
    local_windows: tuple


@dataclass(frozen=True)
class WindowPlan:
    W: int
    L: int
    m: int
    L2: int
    d: int

    def __post_init__(self):
        if not self.m + 1 <= self.W <= self.L:
            raise SpecValidationError(f'window size must lie in {self.m + 1}..{self.L}, got {self.W}')

    @classmethod
    def for_code(cls, spec, md, W):
        return cls(W=W, L=spec.L, m=spec.m, L2=md.L2, d=md.d)

    def window(self, index):
        L, m, W = self.L, self.m, self.W
        last = min(index + W - 1, L - 1)
        # the window that reaches the last replica also takes the trailing check rows
        row_last = L + m - 1 if last == L - 1 else index + W - 1
        first = max(index - m, 0)
        local = tuple(
            LocalWindow(chain=a, depth=b, segment=((a + b) % self.L2, a), replicas=(index, last))
            for a in range(self.L2)
            for b in range(self.d)
        )
        return WindowConfiguration(
            index=index,
            col_replicas=(first, last),
            row_replicas=(index, row_last),
            frozen_replicas=(first, index - 1) if index > first else (),
            local_windows=local,
        )

    def windows(self):
        return [self.window(index) for index in range(self.L)]


class WindowedDecoder:
    """Replica-by-replica decoding of an MD-SC code, one MD window per column replica"""

    def __init__(self, spec, md: MDMappingSet, W, cfg: DecodeConfig = DecodeConfig(), H=None):
        md.check_against(spec)
        self.spec = spec
        self.md = md
        self.cfg = cfg
        self.plan = WindowPlan.for_code(spec, md, W)
        self.H = H if H is not None else assemble_md(spec, md)
        self._stages = [self._stage(window) for window in self.plan.windows()]

    def _columns(self, lo, hi):
        spec, z = self.spec, self.spec.z
        if lo > hi:
            return np.zeros(0, dtype=np.int64)
        width = (hi - lo + 1) * spec.kappa * z
        per_chain = np.arange(width, dtype=np.int64) + lo * spec.kappa * z
        return np.concatenate([a * spec.n_col_groups * z + per_chain for a in range(self.md.L2)])

    def _rows(self, lo, hi):
        spec, z = self.spec, self.spec.z
        width = (hi - lo + 1) * spec.gamma * z
        per_segment = np.arange(width, dtype=np.int64) + lo * spec.gamma * z
        return np.concatenate([s * spec.n_row_groups * z + per_segment for s in range(self.md.L2)])

    def _stage(self, window):
        cols = self._columns(*window.col_replicas)
        rows = self._rows(*window.row_replicas)
        sub = self.H.submatrix(rows, cols)
        replica = self._replica_of(cols)
        return {
            'window': window,
            'cols': cols,
            'rows': rows,
            'decoder': MinSumDecoder(sub, self.cfg),
            'frozen': replica < window.index,
            'targeted': replica == window.index,
        }

    def _replica_of(self, cols):
        spec = self.spec
        return ((cols // spec.z) % spec.n_col_groups) // spec.kappa

    def decode(self, llr):
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.H.n_cols,):
            raise SpecValidationError(f'expected {self.H.n_cols} channel values, got {llr.shape}')
        decided = np.zeros(self.H.n_cols, dtype=np.int8)
        saturated = self.cfg.clip
        for stage in self._stages:
            cols = stage['cols']
            local = llr[cols].copy()
            frozen = stage['frozen']
            local[frozen] = np.where(decided[cols[frozen]] == 1, -saturated, saturated)
            result = stage['decoder'].decode(local, frozen=frozen)
            targeted = stage['targeted']
            decided[cols[targeted]] = result.bits[targeted]
        return decided

    def window_graph(self, index):
        """Check-by-variable submatrix decoded by window ``index``"""
        return self._stages[index]['decoder'].H

    def structure(self):
        """Per-window summary: local windows, targeted and frozen VNs, edges"""
        rows = []
        for stage in self._stages:
            window = stage['window']
            sub = stage['decoder'].H
            rows.append({
                'window': window.index,
                'col_replicas': list(window.col_replicas),
                'row_replicas': list(window.row_replicas),
                'local_windows': [lw.to_dict() for lw in window.local_windows],
                'window_vns': int((~stage['frozen']).sum()),
                'targeted_vns': int(stage['targeted'].sum()),
                'frozen_vns': int(stage['frozen'].sum()),
                'edges': sub.nnz,
            })
        return rows


def md_windowed_decode(spec, md, llr, W, cfg: DecodeConfig = DecodeConfig()):
    return WindowedDecoder(spec, md, W, cfg).decode(llr)


def windowed_decode_1d(spec, llr, W, cfg: DecodeConfig = DecodeConfig()):
    return WindowedDecoder(spec, MDMappingSet.identity(spec, 1, 1), W, cfg).decode(llr)


@dataclass(frozen=True)
class LatencyEstimate:
    window_latency: float
    bound: float
    factor: float

    def to_dict(self):
        return {'window_latency': self.window_latency, 'bound': self.bound, 'factor': self.factor}


def latency_estimate(W, m, L, T_rec, T_dec):
    """Upper bounds on the latency of a W-replica window relative to block decoding"""
    if m < 0 or not m + 1 <= W <= L:
        raise SpecValidationError(f'window size must lie in {m + 1}..{L}, got {W}')
    if T_rec < 0 or T_dec < 0:
        raise SpecValidationError('receive and decode times must be non-negative')
    factor = (W + m) / L
    return LatencyEstimate(
        window_latency=factor * T_rec + (W / L) * T_dec,
        bound=factor * (T_rec + T_dec),
        factor=factor,
    )
