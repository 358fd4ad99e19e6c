"""
Relocation of cycle-critical circulants into the auxiliary matrices of an MD-SC code.

A uniform map ``M`` assigns each block position a target in ``0..d-1``. Under ``M`` a
signature has residue ``delta`` modulo ``L2``; its ``L2`` chain copies merge into
``tau = gcd(L2, delta)`` cycles of length ``L2 * k / tau``, and its score is ``L2 / tau``.
Score 1 marks an active cycle.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np

from .code_model import MDMappingSet
from .cycles import (
    DEFAULT_SIGNATURE_BUDGET,
    check_k,
    map_alternating_sum,
    middle_replica_catalog,
    signature_classes,
)
from .exceptions import SpecValidationError

logger = logging.getLogger(__name__)

DEFAULT_TREE_WIDTH = 64


def delta(sig, grid, L2, gamma, kappa):
    return map_alternating_sum(sig, grid, gamma, kappa) % L2


def tau(delta_value, L2):
    if not 0 <= delta_value < L2:
        raise SpecValidationError(f'delta must lie in 0..{L2 - 1}, got {delta_value}')
    return gcd(L2, delta_value)


def score(sig, grid, L2, gamma, kappa):
    return L2 // tau(delta(sig, grid, L2, gamma, kappa), L2)


def _with_option(grid, position, t):
    i, j = position
    rows = [list(row) for row in grid]
    rows[i][j] = t
    return tuple(tuple(row) for row in rows)


def score_option(sig, position, t, grid, L2, gamma, kappa):
    """Score of option ``t`` for the block ``position``; every visit of that block takes ``t``"""
    return score(sig, _with_option(grid, position, t), L2, gamma, kappa)


def score_divisors(L2):
    """Scores compared by score voting: divisors of L2 up to L2 // 2"""
    return [x for x in range(1, L2 // 2 + 1) if L2 % x == 0]


def _sign_vector(k):
    return np.array([1 if u % 2 == 0 else -1 for u in range(k)], dtype=np.int64)


class CycleIndex:
    """Array view of a middle-replica catalog for fast re-scoring under many maps"""

    def __init__(self, catalog, gamma, kappa, L2):
        self.catalog = catalog
        self.gamma = gamma
        self.kappa = kappa
        self.L2 = L2
        self.k = catalog.k
        sigs = list(catalog)
        self.signs = _sign_vector(self.k)
        self.blocks = np.array(
            [[(r % gamma) * kappa + c % kappa for r, c in sig.seq] for sig in sigs], dtype=np.int64,
        ).reshape(len(sigs), self.k)
        self.divisors = score_divisors(L2)

    def __len__(self):
        return self.blocks.shape[0]

    def flat(self, grid):
        return np.asarray(grid, dtype=np.int64).reshape(self.gamma * self.kappa)

    def deltas(self, flat, rows=None):
        blocks = self.blocks if rows is None else self.blocks[rows]
        return (flat[blocks] @ self.signs) % self.L2

    def scores(self, flat, rows=None):
        return self.L2 // np.gcd(self.L2, self.deltas(flat, rows))

    def active_count(self, flat):
        return int(np.count_nonzero(self.deltas(flat) == 0))

    def spectrum(self, flat):
        scores = self.scores(flat)
        return tuple(int(np.count_nonzero(scores == x)) for x in self.divisors)

    def block(self, position):
        return (position[0] % self.gamma) * self.kappa + position[1] % self.kappa

    def participation(self, flat):
        """Visits of each block position by active signatures, repeated visits counted"""
        active = self.deltas(flat) == 0
        return np.bincount(self.blocks[active].ravel(), minlength=self.gamma * self.kappa)

    def containing(self, position):
        """Signatures visiting the block position of ``position``, in any replica"""
        return (self.blocks == self.block(position)).any(axis=1)


def score_voting(position, index, grid, d):
    """
    Best relocation options for the block position of ``position``.

    ``position`` may be a block position or any H_SC circulant of it. Returns
    ``(options, flagged)``; ``flagged`` is set when no signature visits the block,
    in which case every option survives.
    """
    options = list(range(d))
    rows = index.containing(position)
    if not rows.any():
        return tuple(options), True
    block = index.block(position)
    base = index.flat(grid)
    scores = {}
    for t in options:
        flat = base.copy()
        flat[block] = t
        scores[t] = index.scores(flat, rows)
    for x in index.divisors:
        counts = {t: int(np.count_nonzero(scores[t] == x)) for t in options}
        best = min(counts.values())
        options = [t for t in options if counts[t] == best]
        if len(options) == 1:
            break
    return tuple(options), False


@dataclass(frozen=True)
class RelocationDecision:
    position: tuple
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise SpecValidationError(f'relocation target must be >= 0, got {self.t}')

    def to_dict(self):
        return {'position': list(self.position), 't': self.t}


@dataclass
class TreeNode:
    id: int
    parent: Optional[int]
    level: int
    decision: Optional[RelocationDecision]
    grid: tuple
    active: int
    spectrum: tuple
    expanded: bool = False
    trimmed: bool = False
    children: list = field(default_factory=list)

    def to_dict(self):
        return {
            'id': self.id,
            'parent': self.parent,
            'level': self.level,
            'decision': self.decision.to_dict() if self.decision else None,
            'active': self.active,
            'spectrum': list(self.spectrum),
            'expanded': self.expanded,
            'trimmed': self.trimmed,
        }


@dataclass
class SolutionTree:
    k: int
    L2: int
    d: int
    nodes: list = field(default_factory=list)
    frontier: list = field(default_factory=list)
    widths: list = field(default_factory=list)

    def add(self, parent, level, decision, grid, active, spectrum):
        node = TreeNode(
            id=len(self.nodes), parent=parent.id if parent else None, level=level,
            decision=decision, grid=grid, active=active, spectrum=spectrum,
        )
        self.nodes.append(node)
        if parent:
            parent.children.append(node.id)
        return node

    @property
    def root(self):
        return self.nodes[0]

    @property
    def depth(self):
        return max((node.level for node in self.frontier), default=0)

    def path(self, node):
        decisions = []
        while node.parent is not None:
            decisions.append(node.decision)
            node = self.nodes[node.parent]
        return decisions[::-1]

    def levels(self):
        """``(level, expanded nodes, minimum active count)`` rows"""
        by_level = defaultdict(list)
        for node in self.nodes:
            by_level[node.level].append(node)
        rows = []
        for level in sorted(by_level):
            kept = [n for n in by_level[level] if not n.trimmed]
            if not kept:
                continue
            expanded = sum(1 for n in by_level[level] if n.expanded)
            rows.append((level, expanded, min(n.active for n in kept)))
        return rows

    def mapping(self, node):
        return MDMappingSet.uniform(node.grid, self.L2, self.d)

    def pick(self, seed=None):
        """One surviving leaf, drawn with a seeded generator"""
        rng = np.random.default_rng(seed)
        return self.frontier[int(rng.integers(len(self.frontier)))]

    def to_dict(self):
        return {
            'k': self.k,
            'L2': self.L2,
            'd': self.d,
            'nodes': [node.to_dict() for node in self.nodes],
            'leaves': [node.id for node in self.frontier],
            'widths': list(self.widths),
        }


def _expand(node, index, spec, d):
    flat = index.flat(node.grid)
    visits = index.participation(flat)
    candidates = [b for b in spec.block_positions() if node.grid[b[0]][b[1]] == 0]
    candidates.sort(key=lambda b: (-int(visits[index.block(b)]), b))
    for block in candidates:
        options, flagged = score_voting(block, index, node.grid, d)
        if flagged or 0 in options:
            continue
        children = []
        for t in options:
            grid = _with_option(node.grid, block, t)
            flat_t = index.flat(grid)
            spectrum = index.spectrum(flat_t)
            if spectrum < node.spectrum:
                children.append((RelocationDecision(block, t), grid, index.active_count(flat_t), spectrum))
        if children:
            return children
    return []


def build_solution_tree(spec, k, L2, d, T, catalog=None, width=DEFAULT_TREE_WIDTH, budget=DEFAULT_SIGNATURE_BUDGET):
    """Grow the tree of relocation decisions level by level, trimming to the best spectrum"""
    check_k(k)
    if not 1 <= d <= L2:
        raise SpecValidationError(f'need 1 <= d <= L2, got d={d}, L2={L2}')
    if not 0 <= T <= spec.gamma * spec.kappa:
        raise SpecValidationError(f'density T must lie in 0..{spec.gamma * spec.kappa}, got {T}')
    if width < 1:
        raise SpecValidationError(f'tree width must be >= 1, got {width}')
    if catalog is None:
        catalog = middle_replica_catalog(spec, k, budget=budget)
    index = CycleIndex(catalog, spec.gamma, spec.kappa, L2)

    zero = tuple(tuple(0 for _ in range(spec.kappa)) for _ in range(spec.gamma))
    flat = index.flat(zero)
    tree = SolutionTree(k=k, L2=L2, d=d)
    root = tree.add(None, 0, None, zero, index.active_count(flat), index.spectrum(flat))
    tree.frontier = [root]
    logger.info('catalog holds %d cycles-%d through the middle replica', len(index), k)
    if d == 1:
        logger.warning('depth d=1 leaves no relocation option; returning the all-zero map')
        return tree
    if T == 0:
        logger.warning('density T=0 requested; returning the all-zero map')
        return tree

    for level in range(1, T + 1):
        children = []
        for node in tree.frontier:
            expansions = _expand(node, index, spec, d)
            node.expanded = bool(expansions)
            for decision, grid, active, spectrum in expansions:
                children.append(tree.add(node, level, decision, grid, active, spectrum))
        if not children:
            logger.info('no node expands at level %d; stopping', level)
            break
        best = min(child.spectrum for child in children)
        survivors = [child for child in children if child.spectrum == best][:width]
        kept = {child.id for child in survivors}
        for child in children:
            child.trimmed = child.id not in kept
        for node in tree.frontier:
            node.trimmed = not any(cid in kept for cid in node.children)
        tree.frontier = survivors
        tree.widths.append(len(survivors))
        logger.info('level %d: %d leaves, %d active cycles-%d', level, len(survivors), survivors[0].active, k)
    return tree


def construct_md(spec, k, L2, d, T, seed=None, catalog=None, width=DEFAULT_TREE_WIDTH, budget=DEFAULT_SIGNATURE_BUDGET):
    tree = build_solution_tree(spec, k, L2, d, T, catalog=catalog, width=width, budget=budget)
    return tree.mapping(tree.pick(seed))


def random_md(spec, T, d, L2, shared=True, seed=None):
    """Relocate ``T`` uniformly chosen block positions to uniform targets in 1..d-1"""
    if not 1 <= d <= L2:
        raise SpecValidationError(f'need 1 <= d <= L2, got d={d}, L2={L2}')
    if not 0 <= T <= spec.gamma * spec.kappa:
        raise SpecValidationError(f'density T must lie in 0..{spec.gamma * spec.kappa}, got {T}')
    rng = np.random.default_rng(seed)
    if d == 1:
        logger.warning('depth d=1 leaves no relocation option; returning the all-zero map')
        return MDMappingSet.identity(spec, L2, d)

    def draw():
        grid = np.zeros(spec.gamma * spec.kappa, dtype=np.int64)
        chosen = rng.choice(spec.gamma * spec.kappa, size=T, replace=False)
        grid[chosen] = rng.integers(1, d, size=T)
        return grid.reshape(spec.gamma, spec.kappa).tolist()

    if shared:
        return MDMappingSet.uniform(draw(), L2, d)
    return MDMappingSet(L2=L2, d=d, maps=tuple(draw() for _ in range(L2)))


def _spectrum(weighted, grid, L2, z, gamma, kappa):
    scaled = defaultdict(int)
    k = None
    for sig, placements in weighted:
        k = sig.k
        t = tau(delta(sig, grid, L2, gamma, kappa), L2)
        # L2 chain copies of each lifted cycle merge into t cycles of length L2*k/t
        scaled[L2 * k // t] += z * t * sig.orbit_size * placements
    return {length: total // k for length, total in sorted(scaled.items())}


def predict_md_spectrum(catalog, grid, L2, z, gamma, kappa):
    """Cycle lengths and counts the catalog's signatures produce in the MD-SC code"""
    return _spectrum(((sig, 1) for sig in catalog), grid, L2, z, gamma, kappa)


def predict_md_cycles(spec, k, md, budget=DEFAULT_SIGNATURE_BUDGET):
    """Spectrum prediction over the whole H_SC of a code under a uniform mapping set"""
    md.check_against(spec)
    classes = signature_classes(spec, k, budget=budget)
    return _spectrum(classes, md.shared_map, md.L2, spec.z, spec.gamma, spec.kappa)
