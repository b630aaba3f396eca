"""Conflict graphs of erasure/identity channels and exact maximum bipartite
independent sets (BPIS).

A BPIS of a bipartite graph is a rectangle ``A x B`` containing no edge; its
size is ``|A| * |B|``.  Rows of the adjacency are Python ints used as bitsets.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channel import Channel, sample_erasure_identity
from .errors import BudgetExceeded, DomainError

DEFAULT_SIDE_BUDGET = 24
DEFAULT_DIRECT_BUDGET = 16


@dataclass(frozen=True)
class ConflictGraph:
    """Bipartite graph with ``rows[x]`` the bitset of right vertices adjacent to ``x``."""

    left_size: int
    right_size: int
    rows: tuple[int, ...]

    @property
    def q_size(self) -> int:
        return self.left_size

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self.rows[x] >> y & 1)

    def adjacency(self) -> np.ndarray:
        return np.array([[self.has_edge(x, y) for y in range(self.right_size)]
                         for x in range(self.left_size)], dtype=bool)

    @classmethod
    def from_matrix(cls, matrix) -> "ConflictGraph":
        m = np.asarray(matrix, dtype=bool)
        rows = tuple(sum(1 << int(y) for y in np.nonzero(r)[0]) for r in m)
        return cls(m.shape[0], m.shape[1], rows)


@dataclass(frozen=True)
class Bpis:
    A: frozenset[int]
    B: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.A) * len(self.B)

    def is_independent(self, graph: ConflictGraph) -> bool:
        bmask = sum(1 << y for y in self.B)
        return all(graph.rows[x] & bmask == 0 for x in self.A)


def build_conflict_graph(channel: Channel) -> ConflictGraph:
    """``G_{W,1}``: edge ``(x, y)`` iff ``W(x, y)`` is an erasure."""
    if not channel.is_erasure_identity():
        raise DomainError("conflict graphs are defined for erasure/identity channels only")
    return ConflictGraph.from_matrix(channel.erasure_mask)


def blocklength_conflict_graph(channel: Channel, n: int) -> ConflictGraph:
    """``G_{W,n}`` on ``[Q]^n x [Q]^n``: edge iff some coordinate is erased."""
    if not channel.is_erasure_identity():
        raise DomainError("conflict graphs are defined for erasure/identity channels only")
    words = np.array(list(itertools.product(range(channel.q_size), repeat=n)), dtype=np.int64)
    mask = channel.erasure_mask[words[:, None, :], words[None, :, :]].any(axis=-1)
    return ConflictGraph.from_matrix(mask)


def max_bpis(graph: ConflictGraph, budget: int = DEFAULT_SIDE_BUDGET) -> Bpis:
    """Exact maximum-size BPIS by branch and bound over left subsets.

    Each branch keeps ``B`` equal to the common non-neighbourhood of the
    chosen left vertices and adds for free every candidate whose
    non-neighbourhood already contains ``B``.  A branch is cut when
    ``(|A| + |candidates|) * |B|`` cannot beat the incumbent.  A graph with no
    edgeless rectangle having both sides non-empty gives size 0 with empty
    sides.
    """
    if graph.left_size > budget:
        raise BudgetExceeded(f"left side {graph.left_size} exceeds budget {budget}")
    full_right = (1 << graph.right_size) - 1
    free = [full_right & ~r for r in graph.rows]
    # branch on vertices with large non-neighbourhoods first
    order = sorted(range(graph.left_size), key=lambda x: (-free[x].bit_count(), x))
    best = [0, 0, 0]  # size, A mask, B mask

    def branch(amask: int, count: int, bmask: int, cands: list[int]):
        size = count * bmask.bit_count()
        if size > best[0]:
            best[:] = [size, amask, bmask]
        if not cands or (count + len(cands)) * bmask.bit_count() <= best[0]:
            return
        v, rest = cands[0], cands[1:]
        nb = bmask & free[v]
        if nb:
            absorbed = [u for u in rest if free[u] & nb == nb]
            remaining = [u for u in rest if free[u] & nb != nb]
            amask2 = amask | (1 << v)
            for u in absorbed:
                amask2 |= 1 << u
            branch(amask2, count + 1 + len(absorbed), nb, remaining)
        branch(amask, count, bmask, rest)

    branch(0, 0, full_right, order)
    size, amask, bmask = best
    if size == 0:
        return Bpis(frozenset(), frozenset())
    A = frozenset(x for x in range(graph.left_size) if amask >> x & 1)
    B = frozenset(y for y in range(graph.right_size) if bmask >> y & 1)
    return Bpis(A, B)


@dataclass(frozen=True)
class ProductBpis:
    """The BPIS ``(A^n, B^n)`` of ``G_{W,n}`` built from a single-letter BPIS."""

    base: Bpis
    n: int

    @property
    def size(self) -> int:
        return self.base.size ** self.n

    def contains(self, x, y) -> bool:
        return all(a in self.base.A for a in x) and all(b in self.base.B for b in y)

    def left_words(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(sorted(self.base.A), repeat=self.n)

    def right_words(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(sorted(self.base.B), repeat=self.n)


def max_bpis_blocklength(graph: ConflictGraph, n: int,
                         budget: int = DEFAULT_SIDE_BUDGET) -> ProductBpis:
    """Largest BPIS of ``G_{W,n}``: its size is ``s^n`` for ``s`` the single-letter maximum."""
    if n < 1:
        raise DomainError("blocklength must be positive")
    return ProductBpis(max_bpis(graph, budget), n)


def max_bpis_direct(channel: Channel, n: int, budget: int = DEFAULT_DIRECT_BUDGET) -> Bpis:
    """Exact max BPIS of the explicitly built ``G_{W,n}``; validates the product law.

    Vertices are indices into ``[Q]^n`` in lexicographic order.
    """
    words = channel.q_size ** n
    if words > budget:
        raise BudgetExceeded(f"Q^n = {words} exceeds budget {budget}")
    return max_bpis(blocklength_conflict_graph(channel, n), budget=budget)


def bpis_floor_from_rate(r: float, n: int, q: float) -> float:
    """Guaranteed BPIS size ``2^{rn} - 2^{rn/2} ((1+2^q)^n - 2^{nq})`` at zero-error sum rate ``r``.

    Negative values mean the guarantee is vacuous.
    """
    return 2.0 ** (r * n) - 2.0 ** (r * n / 2) * ((1 + 2.0 ** q) ** n - 2.0 ** (n * q))


@dataclass(frozen=True)
class BpisBoundTrial:
    seed: int
    q_size: int
    q: float
    eps: float
    erased_count: int
    bpis_size: int
    log_rate: float
    bound: float
    satisfied: bool


def bpis_size_threshold(q_size: int, eps: float) -> float:
    """BPIS size ``(2Q+2)/eps`` above which a random channel's graph fails w.p. < 1/4."""
    return (2 * q_size + 2) / eps


def bpis_union_bound(q_size: int, eps: float, s: float) -> float:
    """Union bound ``2^{2Q - eps s}`` on having a BPIS of size ``s``."""
    return 2.0 ** (2 * q_size - eps * s)


def bpis_bound_trial(q_size: int, eps: float, seed: int,
                     budget: int = DEFAULT_SIDE_BUDGET) -> BpisBoundTrial:
    """Sample a channel and compare ``log2`` of its max BPIS with ``q + log2(3/eps)``.

    By the product law the normalised per-blocklength value is the same for
    every ``n``, so only ``G_{W,1}`` is searched.  An empty maximum gives
    ``-inf`` and satisfies the bound.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    channel = sample_erasure_identity(q_size, eps, seed)
    s = max_bpis(build_conflict_graph(channel), budget).size
    q = math.log2(q_size)
    log_rate = math.log2(s) if s > 0 else -math.inf
    bound = q + math.log2(3 / eps)
    return BpisBoundTrial(seed, q_size, q, eps, channel.erased_count, s, log_rate, bound,
                      log_rate <= bound)
