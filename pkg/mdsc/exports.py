"""Parity-check matrix serialization: alist, Matrix Market (pattern) and dense text"""
import io
import logging
from pathlib import Path

import numpy as np
from scipy import io as spio
from scipy import sparse

from .code_model import SparseBinaryMatrix
from .exceptions import ResourceCapExceeded, SpecValidationError

logger = logging.getLogger(__name__)

FORMATS = ('alist', 'matrix-market', 'dense-text')
SUFFIXES = {'.alist': 'alist', '.mtx': 'matrix-market', '.txt': 'dense-text'}
DEFAULT_DENSE_LIMIT = 10 ** 6


def _line(values):
    return ' '.join(str(int(v)) for v in values)


def _to_alist(matrix):
    col_weights = matrix.col_weights()
    row_weights = matrix.row_weights()
    lines = [
        _line([matrix.n_cols, matrix.n_rows]),
        _line([col_weights.max(initial=0), row_weights.max(initial=0)]),
        _line(col_weights),
        _line(row_weights),
    ]
    # 1-based adjacency, columns first then rows
    lines.extend(_line(matrix.col(j) + 1) for j in range(matrix.n_cols))
    lines.extend(_line(matrix.row(i) + 1) for i in range(matrix.n_rows))
    return ('\n'.join(lines) + '\n').encode('ascii')


def _from_alist(data):
    tokens = data.decode('ascii').split('\n')
    lines = [line.split() for line in tokens if line.strip()]
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        rows, cols = [], []
        for j in range(n):
            for value in lines[4 + j]:
                # zero entries are padding in the MacKay layout
                if int(value):
                    rows.append(int(value) - 1)
                    cols.append(j)
    except (IndexError, ValueError) as exc:
        raise SpecValidationError(f'malformed alist data: {exc}') from exc
    return SparseBinaryMatrix.from_coordinates(rows, cols, (m, n))


def _to_matrix_market(matrix):
    buffer = io.BytesIO()
    spio.mmwrite(buffer, sparse.coo_matrix(matrix.csr), field='pattern', symmetry='general')
    return buffer.getvalue()


def _from_matrix_market(data):
    try:
        loaded = spio.mmread(io.BytesIO(data))
    except ValueError as exc:
        raise SpecValidationError(f'malformed Matrix Market data: {exc}') from exc
    coo = sparse.coo_matrix(loaded)
    return SparseBinaryMatrix.from_coordinates(coo.row, coo.col, coo.shape)


def _to_dense_text(matrix, limit):
    entries = matrix.n_rows * matrix.n_cols
    if entries > limit:
        raise ResourceCapExceeded(f'dense export of {entries} entries exceeds the limit of {limit}', limit=limit)
    buffer = io.BytesIO()
    np.savetxt(buffer, matrix.to_dense(), fmt='%d', delimiter='')
    return buffer.getvalue()


def _from_dense_text(data):
    rows = [line.strip() for line in data.decode('ascii').splitlines() if line.strip()]
    try:
        dense = np.array([[int(ch) for ch in row] for row in rows], dtype=np.int8)
    except ValueError as exc:
        raise SpecValidationError(f'malformed dense text: {exc}') from exc
    return SparseBinaryMatrix.from_dense(dense)


def export_matrix(matrix: SparseBinaryMatrix, fmt: str, dense_limit: int = DEFAULT_DENSE_LIMIT) -> bytes:
    if fmt == 'alist':
        return _to_alist(matrix)
    if fmt == 'matrix-market':
        return _to_matrix_market(matrix)
    if fmt == 'dense-text':
        return _to_dense_text(matrix, dense_limit)
    raise SpecValidationError(f'unsupported matrix format {fmt!r}; choose from {", ".join(FORMATS)}')


def import_matrix(data: bytes, fmt: str) -> SparseBinaryMatrix:
    if fmt == 'alist':
        return _from_alist(data)
    if fmt == 'matrix-market':
        return _from_matrix_market(data)
    if fmt == 'dense-text':
        return _from_dense_text(data)
    raise SpecValidationError(f'unsupported matrix format {fmt!r}; choose from {", ".join(FORMATS)}')


def format_for_path(path, fmt=None):
    if fmt:
        return fmt
    try:
        return SUFFIXES[Path(path).suffix.lower()]
    except KeyError:
        raise SpecValidationError(f'cannot infer matrix format from {path!r}; pass it explicitly') from None


def write_matrix(path, matrix, fmt=None, dense_limit=DEFAULT_DENSE_LIMIT):
    fmt = format_for_path(path, fmt)
    payload = export_matrix(matrix, fmt, dense_limit=dense_limit)
    Path(path).write_bytes(payload)
    logger.info('wrote %dx%d matrix to %s (%s)', matrix.n_rows, matrix.n_cols, path, fmt)
    return fmt


def read_matrix(path, fmt=None):
    fmt = format_for_path(path, fmt)
    return import_matrix(Path(path).read_bytes(), fmt)
