"""
Cycle enumeration at circulant level.

A signature is the ordered list of ``k`` circulant positions ``(row_group, col_group)``
a Tanner-graph cycle passes through. Positions ``p[u]`` and ``p[u+1]`` share a row
group when ``u`` is even and a column group when ``u`` is odd; the closing step
``p[k-1] -> p[0]`` shares a column group.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from math import ceil

from .code_model import SparseBinaryMatrix, iter_md_support, iter_sc_support
from .exceptions import ResourceCapExceeded, SpecValidationError

logger = logging.getLogger(__name__)

DEFAULT_SIGNATURE_BUDGET = 10 ** 7
DEFAULT_NODE_LIMIT = 5000
MAX_K = 12

SCOPE_WHOLE = 'whole'
SCOPE_MIDDLE = 'middle'


def check_k(k):
    if k % 2 or k < 4 or k > MAX_K:
        raise SpecValidationError(f'cycle length k must be even and within 4..{MAX_K}, got {k}')


def _sign(u):
    return 1 if u % 2 == 0 else -1


def _transforms(seq):
    k = len(seq)
    rev = seq[::-1]
    for base in (seq, rev):
        for shift in range(0, k, 2):
            yield base[shift:] + base[:shift]


def canonical_form(seq):
    """Return ``(canonical sequence, stabilizer size)`` over even rotations and reversal"""
    seq = tuple(seq)
    best, hits = None, 0
    for candidate in _transforms(seq):
        if best is None or candidate < best:
            best, hits = candidate, 1
        elif candidate == best:
            hits += 1
    return best, hits


@dataclass(frozen=True)
class CycleSignature:
    seq: tuple

    def __post_init__(self):
        seq = tuple((int(r), int(c)) for r, c in self.seq)
        check_k(len(seq))
        k = len(seq)
        for u in range(k):
            a, b = seq[u], seq[(u + 1) % k]
            if a == b:
                raise SpecValidationError(f'consecutive positions {u} and {(u + 1) % k} coincide')
            shared = a[0] == b[0] if u % 2 == 0 else a[1] == b[1]
            if not shared:
                kind = 'row' if u % 2 == 0 else 'column'
                raise SpecValidationError(f'step {u} of the signature does not share a {kind} group')
        canonical, stabilizer = canonical_form(seq)
        object.__setattr__(self, 'seq', canonical)
        object.__setattr__(self, '_stabilizer', stabilizer)

    @property
    def k(self):
        return len(self.seq)

    @property
    def stabilizer_size(self):
        return self._stabilizer

    @property
    def orbit_size(self):
        return self.k // self._stabilizer

    def count(self, position):
        return sum(1 for p in self.seq if p == position)

    def block_positions(self, gamma, kappa):
        return [(r % gamma, c % kappa) for r, c in self.seq]

    def to_list(self):
        return [list(p) for p in self.seq]


@dataclass(frozen=True, eq=False)
class Protograph:
    """Nonzero circulant positions with their powers, plus the replica geometry"""

    n_rows: int
    n_cols: int
    z: int
    powers: dict
    kappa: int = 0
    chain_cols: int = 0

    def __post_init__(self):
        if not self.kappa:
            object.__setattr__(self, 'kappa', self.n_cols)
        if not self.chain_cols:
            object.__setattr__(self, 'chain_cols', self.n_cols)

    @classmethod
    def from_support(cls, support, n_rows, n_cols, z, kappa=0, chain_cols=0):
        powers = {}
        for r, c, f in support:
            if (r, c) in powers:
                raise SpecValidationError(f'circulant ({r}, {c}) given twice')
            powers[(int(r), int(c))] = int(f)
        return cls(n_rows=n_rows, n_cols=n_cols, z=z, powers=powers, kappa=kappa, chain_cols=chain_cols)

    @classmethod
    def from_sc(cls, spec):
        return cls.from_support(
            iter_sc_support(spec), spec.n_row_groups, spec.n_col_groups, spec.z,
            kappa=spec.kappa, chain_cols=spec.n_col_groups,
        )

    @classmethod
    def from_md(cls, spec, md):
        return cls.from_support(
            iter_md_support(spec, md), md.L2 * spec.n_row_groups, md.L2 * spec.n_col_groups, spec.z,
            kappa=spec.kappa, chain_cols=spec.n_col_groups,
        )

    @cached_property
    def _rows(self):
        index = defaultdict(list)
        for position in sorted(self.powers):
            index[position[0]].append(position)
        return dict(index)

    @cached_property
    def _cols(self):
        index = defaultdict(list)
        for position in sorted(self.powers, key=lambda p: (p[1], p[0])):
            index[position[1]].append(position)
        return dict(index)

    def row_mates(self, position):
        return self._rows.get(position[0], ())

    def col_mates(self, position):
        return self._cols.get(position[1], ())

    def column_replica(self, col_group):
        return (col_group % self.chain_cols) // self.kappa

    def positions_in_replica(self, replica):
        return sorted(p for p in self.powers if self.column_replica(p[1]) == replica)

    def power(self, position):
        try:
            return self.powers[position]
        except KeyError:
            raise SpecValidationError(f'circulant {position} is zero in this protograph') from None


@dataclass(frozen=True)
class CycleCatalog:
    k: int
    signatures: tuple
    scope: str = SCOPE_WHOLE

    def __post_init__(self):
        seen = set()
        for sig in self.signatures:
            if sig.seq in seen:
                raise SpecValidationError('catalog holds a duplicate signature')
            seen.add(sig.seq)

    def __len__(self):
        return len(self.signatures)

    def __iter__(self):
        return iter(self.signatures)

    def containing(self, position):
        return [sig for sig in self.signatures if position in sig.seq]

    def to_dict(self):
        return {'k': self.k, 'scope': self.scope, 'signatures': [sig.to_list() for sig in self.signatures]}

    @classmethod
    def from_dict(cls, data):
        try:
            sigs = tuple(CycleSignature(tuple(tuple(p) for p in seq)) for seq in data['signatures'])
            return cls(k=int(data['k']), signatures=sigs, scope=data.get('scope', SCOPE_WHOLE))
        except (KeyError, TypeError) as exc:
            raise SpecValidationError(f'malformed cycle catalog: {exc}') from exc


def _half_walks(proto, anchor, steps, admissible):
    """Alternating walks from ``anchor``; step ``u`` is a row move when ``u`` is even"""
    walks = [(anchor,)]
    for u in steps:
        extended = []
        row_step = u % 2 == 0
        for path in walks:
            last = path[-1]
            mates = proto.row_mates(last) if row_step else proto.col_mates(last)
            for q in mates:
                if q == last or not admissible(q):
                    continue
                extended.append(path + (q,))
        walks = extended
    return walks


def _closed_walks(proto, k, anchor, modulus, admissible):
    """Yield every closed alternating walk of length ``k`` starting at ``anchor``"""
    h = k // 2
    powers = proto.powers

    # forward covers p[0..h], sums p[0..h-1]; backward covers p[k-1..h], sums p[h..k-1]
    forward = []
    for path in _half_walks(proto, anchor, range(h), admissible):
        total = sum(_sign(u) * powers[path[u]] for u in range(h))
        forward.append((path, total))
    backward = defaultdict(list)
    for path in _half_walks(proto, anchor, range(k - 1, h - 1, -1), admissible):
        # path = (p0, p[k-1], ..., p[h])
        tail = path[1:]
        total = sum(_sign(k - 1 - n) * powers[q] for n, q in enumerate(tail))
        key = (tail[-1], total % modulus) if modulus else (tail[-1], None)
        backward[key].append(tail)

    for path, total in forward:
        key = (path[-1], (-total) % modulus) if modulus else (path[-1], None)
        for tail in backward.get(key, ()):
            yield path + tuple(reversed(tail[:-1]))


def _enumerate(proto, k, anchors, modulus, budget):
    anchor_set = set(anchors)
    found = {}
    walked = 0
    for anchor in anchors:
        floor = (anchor[1], anchor[0])

        def admissible(q, floor=floor):
            return q not in anchor_set or (q[1], q[0]) >= floor

        for seq in _closed_walks(proto, k, anchor, modulus, admissible):
            walked += 1
            if walked > budget:
                logger.error('signature budget of %d exhausted at k=%d', budget, k)
                raise ResourceCapExceeded(f'signature budget of {budget} exceeded', limit=budget)
            canonical, stabilizer = canonical_form(seq)
            found.setdefault(canonical, stabilizer)
    return found


def middle_replica(L):
    """Zero-based index of the middle replica"""
    return ceil(L / 2) - 1


def enumerate_signatures(proto, k, scope=SCOPE_WHOLE, closure_modulus=None, budget=DEFAULT_SIGNATURE_BUDGET, L=None):
    """
    All canonical closed alternating sequences of length ``k`` over the protograph.

    With ``closure_modulus`` set only sequences whose alternating power sum vanishes
    modulo it are kept. The middle scope needs the coupling length ``L``.
    """
    check_k(k)
    if scope == SCOPE_WHOLE:
        anchors = sorted(proto.powers, key=lambda p: (p[1], p[0]))
    elif scope == SCOPE_MIDDLE:
        if L is None:
            raise SpecValidationError('middle-replica scope needs the coupling length L')
        anchors = sorted(proto.positions_in_replica(middle_replica(L)), key=lambda p: (p[1], p[0]))
    else:
        raise SpecValidationError(f'unknown catalog scope {scope!r}')
    found = _enumerate(proto, k, anchors, closure_modulus, budget)
    signatures = tuple(CycleSignature(seq) for seq in sorted(found))
    logger.info('enumerated %d signatures (k=%d, scope=%s)', len(signatures), k, scope)
    return CycleCatalog(k=k, signatures=signatures, scope=scope)


def lift_closure_sum(sig, powers, z):
    """Sum over u = 1..k of (-1)^u f(p_u), modulo z"""
    seq = sig.seq if isinstance(sig, CycleSignature) else tuple(sig)
    total = 0
    for u, position in enumerate(seq, start=1):
        try:
            f = powers[position]
        except KeyError:
            raise SpecValidationError(f'circulant {position} is not in the support') from None
        total += f if u % 2 == 0 else -f
    return total % z


def lifted_simplicity(sig, powers, z):
    """True when the closed lifted walk from offset 0 visits k distinct Tanner-graph nodes"""
    seq = sig.seq if isinstance(sig, CycleSignature) else tuple(sig)
    offset = 0
    seen = set()
    for u, (r, c) in enumerate(seq):
        f = powers[(r, c)]
        if u % 2 == 0:
            offset = (offset - f) % z
            node = ('check', r, offset)
        else:
            offset = (offset + f) % z
            node = ('variable', c, offset)
        if node in seen:
            return False
        seen.add(node)
    return offset == 0


def signature_classes(spec, k, md=None, budget=DEFAULT_SIGNATURE_BUDGET):
    """
    Closed, lift-simple signature classes with their number of placements along the chain.

    Classes are enumerated once, anchored at column replica 0 of a coupling length just
    long enough to hold any cycle of length ``k``.
    """
    check_k(k)
    L_eff = min(spec.L, (k // 2) * spec.m + 1)
    window = spec.with_length(L_eff)
    proto = Protograph.from_md(window, md) if md is not None else Protograph.from_sc(window)
    anchors = sorted(proto.positions_in_replica(0), key=lambda p: (p[1], p[0]))
    found = _enumerate(proto, k, anchors, spec.z, budget)

    classes = []
    for seq in sorted(found):
        if not lifted_simplicity(seq, proto.powers, spec.z):
            continue
        replicas = [proto.column_replica(c) for _, c in seq]
        placements = spec.L - (max(replicas) - min(replicas))
        if placements > 0:
            classes.append((CycleSignature(seq), placements))
    return classes


def count_cycles(spec, k, md=None, budget=DEFAULT_SIGNATURE_BUDGET):
    """Exact number of simple cycles of length ``k`` in the lifted graph of H_SC or of the MD-SC code"""
    classes = signature_classes(spec, k, md=md, budget=budget)
    # every lifted cycle is met k times: k/2 variable-node starts, two directions
    scaled = sum(spec.z * sig.orbit_size * placements for sig, placements in classes)
    total = scaled // k
    logger.info('k=%d: %d signature classes, %d lifted cycles', k, len(classes), total)
    return total


def middle_replica_catalog(spec, k, budget=DEFAULT_SIGNATURE_BUDGET):
    """
    Closed, lift-simple signatures of H_SC whose leftmost column replica is the middle one.

    Each translation class along the chain appears once.
    """
    proto = Protograph.from_sc(spec)
    mid = middle_replica(spec.L)
    catalog = enumerate_signatures(proto, k, scope=SCOPE_MIDDLE, closure_modulus=spec.z, budget=budget, L=spec.L)
    kept = tuple(
        sig for sig in catalog
        if min(proto.column_replica(c) for _, c in sig.seq) == mid and lifted_simplicity(sig, proto.powers, spec.z)
    )
    logger.info('middle replica holds %d of %d touching signatures (k=%d)', len(kept), len(catalog), k)
    return CycleCatalog(k=k, signatures=kept, scope=SCOPE_MIDDLE)


def map_alternating_sum(sig, grid, gamma, kappa):
    """Sum over u = 0..k-1 of (-1)^u M(block position of p_u)"""
    return sum(_sign(u) * grid[r % gamma][c % kappa] for u, (r, c) in enumerate(sig.seq))


def classify_active(catalog, md, gamma, kappa):
    """Split a catalog into (active, inactive) under a uniform mapping set"""
    grid = md.shared_map
    active, inactive = [], []
    for sig in catalog:
        if map_alternating_sum(sig, grid, gamma, kappa) % md.L2 == 0:
            active.append(sig)
        else:
            inactive.append(sig)
    return active, inactive


def lifted_count(signatures, z):
    """Cycles of the lifted graph behind a set of same-length signatures, one chain copy"""
    signatures = list(signatures)
    if not signatures:
        return 0
    return sum(z * sig.orbit_size for sig in signatures) // signatures[0].k


def brute_force_count(matrix: SparseBinaryMatrix, k, node_limit=DEFAULT_NODE_LIMIT):
    """Simple cycles of length ``k`` by rooted DFS on the lifted bipartite graph"""
    check_k(k)
    n_nodes = matrix.n_rows + matrix.n_cols
    if n_nodes > node_limit:
        raise ResourceCapExceeded(f'graph with {n_nodes} nodes exceeds the brute-force limit of {node_limit}', limit=node_limit)

    # variable nodes first, then check nodes
    n = matrix.n_cols
    adjacency = [[n + int(i) for i in matrix.col(j)] for j in range(n)]
    adjacency += [[int(j) for j in matrix.row(i)] for i in range(matrix.n_rows)]

    total = 0
    for root in range(n_nodes):
        path = [root]
        on_path = {root}
        stack = [iter(adjacency[root])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == root:
                # each cycle once: fixed by its smallest node and orientation
                if len(path) == k and path[1] < path[-1]:
                    total += 1
                continue
            if nxt < root or nxt in on_path or len(path) == k:
                continue
            path.append(nxt)
            on_path.add(nxt)
            stack.append(iter(adjacency[nxt]))
    return total
