"""
Circulant-based block, spatially-coupled and multi-dimensional SC codes.

Protograph coordinates are zero-based. A row group ``r`` of ``H_SC`` sits in row
replica ``r // gamma`` and a column group ``c`` in replica ``c // kappa``. The
circulant ``sigma^f`` has its ones at ``(a, (a + f) mod z)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
from scipy import sparse

from .exceptions import SpecValidationError

logger = logging.getLogger(__name__)


def _as_grid(values, rows, cols, name):
    grid = tuple(tuple(int(v) for v in row) for row in values)
    if len(grid) != rows or any(len(row) != cols for row in grid):
        raise SpecValidationError(f'{name} must be {rows}x{cols}')
    return grid


@dataclass(frozen=True)
class BlockCodeSpec:
    gamma: int
    kappa: int
    z: int
    CM: tuple

    def __post_init__(self):
        if self.gamma < 2:
            raise SpecValidationError(f'gamma must be >= 2, got {self.gamma}')
        if self.kappa <= self.gamma:
            raise SpecValidationError(f'kappa must exceed gamma, got kappa={self.kappa}, gamma={self.gamma}')
        if self.z < 2:
            raise SpecValidationError(f'z must be >= 2, got {self.z}')
        grid = _as_grid(self.CM, self.gamma, self.kappa, 'CM')
        for i, row in enumerate(grid):
            for j, f in enumerate(row):
                if not 0 <= f < self.z:
                    raise SpecValidationError(f'CM[{i}][{j}]={f} outside 0..{self.z - 1}')
        object.__setattr__(self, 'CM', grid)

    def power(self, i, j):
        return self.CM[i][j]


@dataclass(frozen=True)
class SCCodeSpec:
    block: BlockCodeSpec
    m: int
    L: int
    PM: tuple

    def __post_init__(self):
        if self.m < 1:
            raise SpecValidationError(f'memory m must be >= 1, got {self.m}')
        if self.L < self.m + 1:
            raise SpecValidationError(f'coupling length L must be >= m+1, got L={self.L}, m={self.m}')
        grid = _as_grid(self.PM, self.block.gamma, self.block.kappa, 'PM')
        for i, row in enumerate(grid):
            for j, h in enumerate(row):
                if not 0 <= h <= self.m:
                    raise SpecValidationError(f'PM[{i}][{j}]={h} outside 0..{self.m}')
        object.__setattr__(self, 'PM', grid)

    @property
    def gamma(self):
        return self.block.gamma

    @property
    def kappa(self):
        return self.block.kappa

    @property
    def z(self):
        return self.block.z

    @property
    def n_row_groups(self):
        return (self.L + self.m) * self.gamma

    @property
    def n_col_groups(self):
        return self.L * self.kappa

    @property
    def length(self):
        return self.L * self.kappa * self.z

    @property
    def design_rate(self):
        return 1 - (self.L + self.m) * self.gamma / (self.L * self.kappa)

    def with_length(self, L):
        """Same constituent block code and partitioning, different coupling length"""
        return SCCodeSpec(block=self.block, m=self.m, L=L, PM=self.PM)

    def block_positions(self):
        return [(i, j) for i in range(self.gamma) for j in range(self.kappa)]

    def to_dict(self):
        return {
            'gamma': self.gamma,
            'kappa': self.kappa,
            'z': self.z,
            'm': self.m,
            'L': self.L,
            'PM': [list(row) for row in self.PM],
            'CM': [list(row) for row in self.block.CM],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            block = BlockCodeSpec(
                gamma=int(data['gamma']), kappa=int(data['kappa']), z=int(data['z']), CM=data['CM'],
            )
            return cls(block=block, m=int(data['m']), L=int(data['L']), PM=data['PM'])
        except KeyError as exc:
            raise SpecValidationError(f'missing field {exc.args[0]!r} in code spec') from exc
        except TypeError as exc:
            raise SpecValidationError(f'malformed code spec: {exc}') from exc


@dataclass(frozen=True)
class MDMappingSet:
    L2: int
    d: int
    maps: tuple

    def __post_init__(self):
        if not 1 <= self.d <= self.L2:
            raise SpecValidationError(f'need 1 <= d <= L2, got d={self.d}, L2={self.L2}')
        if len(self.maps) != self.L2:
            raise SpecValidationError(f'expected {self.L2} chain maps, got {len(self.maps)}')
        maps = tuple(tuple(tuple(int(v) for v in row) for row in chain) for chain in self.maps)
        shape = (len(maps[0]), len(maps[0][0]) if maps[0] else 0)
        for a, chain in enumerate(maps):
            if (len(chain), len(chain[0]) if chain else 0) != shape or any(len(r) != shape[1] for r in chain):
                raise SpecValidationError(f'chain map {a} has a different shape')
            for i, row in enumerate(chain):
                for j, t in enumerate(row):
                    if not 0 <= t < self.d:
                        raise SpecValidationError(f'map entry maps[{a}][{i}][{j}]={t} not in 0..{self.d - 1}')
        object.__setattr__(self, 'maps', maps)

    @classmethod
    def uniform(cls, grid, L2, d):
        grid = tuple(tuple(int(v) for v in row) for row in grid)
        return cls(L2=L2, d=d, maps=(grid,) * L2)

    @classmethod
    def identity(cls, spec, L2, d=1):
        return cls.uniform([[0] * spec.kappa for _ in range(spec.gamma)], L2, d)

    @property
    def is_uniform(self):
        return all(chain == self.maps[0] for chain in self.maps)

    @property
    def shared_map(self):
        if not self.is_uniform:
            raise SpecValidationError('mapping set is not uniform across chains')
        return self.maps[0]

    @property
    def density(self):
        """Number of relocated block positions of the shared map"""
        return sum(1 for row in self.shared_map for t in row if t)

    def check_against(self, spec):
        for chain in self.maps:
            if len(chain) != spec.gamma or any(len(row) != spec.kappa for row in chain):
                raise SpecValidationError(
                    f'mapping shape does not match code ({spec.gamma}x{spec.kappa})'
                )

    def to_dict(self):
        return {
            'L2': self.L2,
            'd': self.d,
            'maps': [[list(row) for row in chain] for chain in self.maps],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(L2=int(data['L2']), d=int(data['d']), maps=data['maps'])
        except KeyError as exc:
            raise SpecValidationError(f'missing field {exc.args[0]!r} in mapping set') from exc
        except (TypeError, IndexError) as exc:
            raise SpecValidationError(f'malformed mapping set: {exc}') from exc


@dataclass(frozen=True, eq=False)
class SparseBinaryMatrix:
    """Row-indexed sparse 0/1 matrix backed by a CSR array with sorted indices"""

    csr: sparse.csr_array = field(repr=False)

    def __post_init__(self):
        csr = sparse.csr_array(self.csr, dtype=np.int8)
        csr.sum_duplicates()
        csr.sort_indices()
        if csr.nnz and csr.data.max() > 1:
            raise SpecValidationError('matrix has repeated entries')
        object.__setattr__(self, 'csr', csr)

    @classmethod
    def from_coordinates(cls, rows, cols, shape):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        data = np.ones(rows.shape[0], dtype=np.int8)
        return cls(sparse.csr_array((data, (rows, cols)), shape=shape))

    @classmethod
    def from_dense(cls, dense):
        return cls(sparse.csr_array(np.asarray(dense, dtype=np.int8)))

    @property
    def shape(self):
        return self.csr.shape

    @property
    def n_rows(self):
        return self.csr.shape[0]

    @property
    def n_cols(self):
        return self.csr.shape[1]

    @property
    def nnz(self):
        return int(self.csr.nnz)

    @cached_property
    def csc(self):
        csc = self.csr.tocsc()
        csc.sort_indices()
        return csc

    def row(self, i):
        return self.csr.indices[self.csr.indptr[i]:self.csr.indptr[i + 1]]

    def col(self, j):
        return self.csc.indices[self.csc.indptr[j]:self.csc.indptr[j + 1]]

    def row_weights(self):
        return np.diff(self.csr.indptr)

    def col_weights(self):
        return np.diff(self.csc.indptr)

    def to_dense(self):
        return self.csr.toarray()

    def submatrix(self, rows, cols):
        return SparseBinaryMatrix(self.csr[np.asarray(rows)][:, np.asarray(cols)])

    def syndrome(self, bits):
        bits = np.asarray(bits, dtype=np.int64)
        return (self.csr @ bits) % 2

    def __eq__(self, other):
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.csr.indptr, other.csr.indptr)
            and np.array_equal(self.csr.indices, other.csr.indices)
        )

    __hash__ = None


def lift(support, n_row_groups, n_col_groups, z):
    """Expand ``(row_group, col_group, power)`` triples into the bit-level matrix"""
    if not support:
        return SparseBinaryMatrix.from_coordinates([], [], (n_row_groups * z, n_col_groups * z))
    groups = np.asarray(support, dtype=np.int64)
    offsets = np.arange(z, dtype=np.int64)
    rows = groups[:, 0:1] * z + offsets
    cols = groups[:, 1:2] * z + (offsets + groups[:, 2:3]) % z
    return SparseBinaryMatrix.from_coordinates(rows.ravel(), cols.ravel(), (n_row_groups * z, n_col_groups * z))


def expand_block(spec: BlockCodeSpec) -> SparseBinaryMatrix:
    support = [(i, j, spec.power(i, j)) for i in range(spec.gamma) for j in range(spec.kappa)]
    return lift(support, spec.gamma, spec.kappa, spec.z)


def sc_circulant_at(spec: SCCodeSpec, i: int, j: int) -> Optional[int]:
    if not (0 <= i < spec.n_row_groups and 0 <= j < spec.n_col_groups):
        raise SpecValidationError(
            f'circulant index ({i}, {j}) outside {spec.n_row_groups}x{spec.n_col_groups} protograph'
        )
    offset = i // spec.gamma - j // spec.kappa
    if 0 <= offset <= spec.m and spec.PM[i % spec.gamma][j % spec.kappa] == offset:
        return spec.block.power(i % spec.gamma, j % spec.kappa)
    return None


def iter_sc_support(spec: SCCodeSpec) -> Iterator[tuple]:
    """Yield ``(row_group, col_group, power)`` for every nonzero circulant of H_SC"""
    g, k = spec.gamma, spec.kappa
    for replica in range(spec.L):
        for bi in range(g):
            for bj in range(k):
                yield ((replica + spec.PM[bi][bj]) * g + bi, replica * k + bj, spec.block.power(bi, bj))


def iter_md_support(spec: SCCodeSpec, md: MDMappingSet) -> Iterator[tuple]:
    """Nonzero circulants of the MD protograph: chain ``a`` block ``t`` lands in segment ``((a+t) mod L2, a)``"""
    md.check_against(spec)
    rows, cols = spec.n_row_groups, spec.n_col_groups
    for a in range(md.L2):
        chain = md.maps[a]
        for r, c, f in iter_sc_support(spec):
            t = chain[r % spec.gamma][c % spec.kappa]
            yield (((a + t) % md.L2) * rows + r, a * cols + c, f)


def assemble_sc(spec: SCCodeSpec) -> SparseBinaryMatrix:
    matrix = lift(list(iter_sc_support(spec)), spec.n_row_groups, spec.n_col_groups, spec.z)
    logger.debug('assembled H_SC %dx%d (L=%d)', matrix.n_rows, matrix.n_cols, spec.L)
    return matrix


def assemble_md(spec: SCCodeSpec, md: MDMappingSet) -> SparseBinaryMatrix:
    matrix = lift(
        list(iter_md_support(spec, md)),
        md.L2 * spec.n_row_groups,
        md.L2 * spec.n_col_groups,
        spec.z,
    )
    logger.debug('assembled H_SC^MD %dx%d (L2=%d, d=%d)', matrix.n_rows, matrix.n_cols, md.L2, md.d)
    return matrix


def segment_of(spec: SCCodeSpec, row_group: int, col_group: int) -> tuple:
    """Segment ``(a, b)`` holding an MD protograph coordinate"""
    return row_group // spec.n_row_groups, col_group // spec.n_col_groups


def column_replica(spec: SCCodeSpec, col_group: int) -> int:
    return (col_group % spec.n_col_groups) // spec.kappa


def row_replica(spec: SCCodeSpec, row_group: int) -> int:
    return (row_group % spec.n_row_groups) // spec.gamma

