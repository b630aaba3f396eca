"""Near-uniform pair types, diversity, and explicit near-uniform set families.

A word pair ``(x, y)`` is gamma-uniform when every symbol pair ``(a, b)``
occurs between ``(1 - gamma) n / Q^2`` and ``(1 + gamma) n / Q^2`` times
(closed interval, compared exactly).  Families ``A, B`` are gamma-uniform
when every cross pair is.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numbers import as_fraction, floor_times
from .bpis import ConflictGraph, max_bpis
from .errors import BudgetExceeded, DomainError
from .families import (BinaryImage, BlockBalanced, HammingBallUnion, SetFamily,
                       binary_map)

AUDIT_CHUNK = 1 << 15


def type_of(x, y, q_size: int) -> np.ndarray:
    """``counts[a, b] = #{i : (x_i, y_i) = (a, b)}``."""
    xa, ya = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
    if xa.shape != ya.shape:
        raise DomainError(f"length mismatch: {xa.size} vs {ya.size}")
    return np.bincount(xa * q_size + ya, minlength=q_size * q_size).reshape(q_size, q_size)


def type_counts(X: np.ndarray, Y: np.ndarray, q_size: int) -> np.ndarray:
    """Row-wise types of paired word arrays, flattened to shape ``(m, Q^2)``."""
    m = X.shape[0]
    q2 = q_size * q_size
    idx = X * q_size + Y + (np.arange(m, dtype=np.int64) * q2)[:, None]
    return np.bincount(idx.ravel(), minlength=m * q2).reshape(m, q2)


@dataclass(frozen=True)
class UniformPairSpec:
    """Exact occurrence window for one symbol pair."""

    n: int
    q_size: int
    gamma: Fraction

    @property
    def lower(self) -> Fraction:
        return (1 - self.gamma) * Fraction(self.n, self.q_size ** 2)

    @property
    def upper(self) -> Fraction:
        return (1 + self.gamma) * Fraction(self.n, self.q_size ** 2)

    @property
    def count_range(self) -> tuple[int, int]:
        """Integer counts allowed by the window."""
        return max(math.ceil(self.lower), 0), math.floor(self.upper)


def uniform_spec(n: int, q_size: int, gamma) -> UniformPairSpec:
    g = as_fraction(gamma)
    if g < 0:
        raise DomainError("gamma must be non-negative")
    return UniformPairSpec(n, q_size, g)


def is_gamma_uniform_pair(x, y, gamma, q_size: int) -> bool:
    counts = type_of(x, y, q_size)
    lo, hi = uniform_spec(len(x), q_size, gamma).count_range
    return bool(np.all((counts >= lo) & (counts <= hi)))


def uniform_mask(X: np.ndarray, Y: np.ndarray, gamma, q_size: int) -> np.ndarray:
    """Vectorised :func:`is_gamma_uniform_pair` over paired rows."""
    lo, hi = uniform_spec(X.shape[1], q_size, gamma).count_range
    out = np.empty(X.shape[0], dtype=bool)
    for start in range(0, X.shape[0], AUDIT_CHUNK):
        c = type_counts(X[start:start + AUDIT_CHUNK], Y[start:start + AUDIT_CHUNK], q_size)
        out[start:start + AUDIT_CHUNK] = np.all((c >= lo) & (c <= hi), axis=1)
    return out


@dataclass(frozen=True)
class Verdict:
    """``proved`` (exhaustive), ``audited`` (no violation among samples) or ``refuted``."""

    kind: str
    samples: int
    witness: tuple | None = None

    def __bool__(self):
        return self.kind != "refuted"


def is_gamma_uniform_sets(A: SetFamily, B: SetFamily, gamma, audit_budget: int = 100_000,
                          seed=0) -> Verdict:
    """Check every cross pair when ``|A||B| <= audit_budget``, else audit random cross pairs."""
    if A.q_size != B.q_size or A.n != B.n:
        raise DomainError("families must share alphabet and length")
    q = A.q_size
    if A.cardinality * B.cardinality <= audit_budget:
        wa, wb = A.enumerate(audit_budget), B.enumerate(audit_budget)
        na, nb = len(wa), len(wb)
        rows_per_chunk = max(1, AUDIT_CHUNK // nb)
        for start in range(0, na, rows_per_chunk):
            block = wa[start:start + rows_per_chunk]
            X = np.repeat(block, nb, axis=0)
            Y = np.tile(wb, (len(block), 1))
            ok = uniform_mask(X, Y, gamma, q)
            if not ok.all():
                i = int(np.argmin(ok))
                return Verdict("refuted", start * nb + i + 1, (tuple(X[i].tolist()), tuple(Y[i].tolist())))
        return Verdict("proved", na * nb)
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < audit_budget:
        m = min(AUDIT_CHUNK, audit_budget - checked)
        X, Y = A.sample(m, rng), B.sample(m, rng)
        ok = uniform_mask(X, Y, gamma, q)
        if not ok.all():
            i = int(np.argmin(ok))
            return Verdict("refuted", checked + i + 1, (tuple(X[i].tolist()), tuple(Y[i].tolist())))
        checked += m
    return Verdict("audited", checked)


# -- diversity -------------------------------------------------------------------

def min_distinct_pairs(x, y, k: int, q_size: int) -> int:
    """Fewest distinct symbol pairs seen on any ``k`` coordinates.

    The minimising index set takes the most frequent pairs first.
    """
    if k <= 0:
        return 0
    counts = np.sort(type_of(x, y, q_size).ravel())[::-1]
    return int(np.searchsorted(np.cumsum(counts), k) + 1)


def is_diverse_pair(x, y, d, eps, q_size: int) -> bool:
    """Every ``floor(dn)`` coordinates carry more than ``eps Q^2`` distinct pairs.

    With ``floor(dn) = 0`` there is no index set to test and the answer is ``True``.
    """
    n = len(x)
    k = floor_times(d, n)
    if k == 0:
        return True
    return Fraction(min_distinct_pairs(x, y, k, q_size)) > as_fraction(eps) * q_size ** 2


def is_diverse_pair_brute(x, y, d, eps, q_size: int) -> bool:
    """Reference check enumerating every ``floor(dn)``-subset of coordinates."""
    n = len(x)
    k = floor_times(d, n)
    if k == 0:
        return True
    pairs = list(zip(x, y))
    fewest = min(len({pairs[i] for i in idx}) for idx in itertools.combinations(range(n), k))
    return Fraction(fewest) > as_fraction(eps) * q_size ** 2


def diversity_gate(gamma, d, eps) -> bool:
    """``d > (1 + gamma) eps``: when near-uniform pairs are guaranteed diverse."""
    return as_fraction(d) > (1 + as_fraction(gamma)) * as_fraction(eps)


# -- constructions -------------------------------------------------------------------

def binary_uniform_pair(n: int, gamma) -> tuple[HammingBallUnion, BlockBalanced]:
    """Binary gamma-uniform pair built around ``0^{n/2} 1^{n/2}``.

    ``A`` is the union of the radius ``floor(gamma n/4)`` balls around that
    word and its complement; ``B`` holds the words with exactly ``n/4`` ones
    in each half.
    """
    if n % 4:
        raise DomainError(f"n={n} must be divisible by 4")
    g = as_fraction(gamma)
    if not 0 < g < 2:
        raise DomainError("gamma must lie in (0, 2)")
    radius = floor_times(g / 4, n)
    a = (0,) * (n // 2) + (1,) * (n // 2)
    a_bar = tuple(1 - s for s in a)
    return HammingBallUnion(2, [a, a_bar], radius), BlockBalanced(2, n, 2)


def staircase_word(q_size: int, n: int) -> tuple[int, ...]:
    """``0^{n/Q} 1^{n/Q} ... (Q-1)^{n/Q}``."""
    return tuple(i * q_size // n for i in range(n))


def staircase_uniform_pair(q_size: int, n: int, gamma) -> tuple[HammingBallUnion, BlockBalanced]:
    """Gamma-uniform pair over ``[Q]^n`` for ``Q >= 3``.

    ``A`` is the radius ``floor(gamma n/Q^2)`` ball around the staircase word;
    ``B`` holds words using every symbol ``n/Q^2`` times in each of the ``Q``
    blocks.  The size guarantee needs ``n >= Q^3``; smaller ``n`` only warns.
    """
    if q_size < 3:
        raise DomainError("Q must be at least 3")
    if n % (q_size * q_size):
        raise DomainError(f"n={n} must be divisible by Q^2={q_size * q_size}")
    g = as_fraction(gamma)
    if not 0 <= g <= q_size * q_size:
        raise DomainError("gamma must lie in [0, Q^2]")
    if n < q_size ** 3:
        warnings.warn(f"n={n} < Q^3={q_size ** 3}: the size guarantee does not apply",
                      stacklevel=2)
    radius = floor_times(g / (q_size * q_size), n)
    return (HammingBallUnion(q_size, [staircase_word(q_size, n)], radius),
            BlockBalanced(q_size, n, q_size))


def uniform_pair(q_size: int, n: int, gamma):
    """The binary construction for ``Q = 2``, the staircase one otherwise."""
    if q_size == 2:
        return binary_uniform_pair(n, gamma)
    return staircase_uniform_pair(q_size, n, gamma)


def binary_map_is_balanced(q: int) -> bool:
    """Each bit position is 1 for exactly half of the ``2^q`` symbols."""
    return bool(np.all(binary_map(q).sum(axis=0) == 2 ** (q - 1)))


def binary_reduction(A: SetFamily, B: SetFamily, q: int) -> tuple[BinaryImage, BinaryImage]:
    """Map both families symbol-wise to ``q``-bit binary representations.

    The map is injective and bit-balanced, so sizes and gamma-uniformity carry over.
    """
    if q < 1 or A.q_size != 2 ** q or B.q_size != 2 ** q:
        raise DomainError("alphabet must be 2^q")
    return BinaryImage(A, q), BinaryImage(B, q)


@dataclass(frozen=True)
class UniformBiclique:
    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.A) * len(self.B)


def max_uniform_biclique_exact(q_size: int, n: int, gamma, budget: int = 16) -> UniformBiclique:
    """Largest ``|A||B|`` with every cross pair gamma-uniform, over all of ``[Q]^n``.

    Solved as a maximum BPIS of the graph joining non-uniform pairs.
    """
    total = q_size ** n
    if total > budget:
        raise BudgetExceeded(f"Q^n = {total} exceeds budget {budget}")
    words = np.array(list(itertools.product(range(q_size), repeat=n)), dtype=np.int64)
    X = np.repeat(words, total, axis=0)
    Y = np.tile(words, (total, 1))
    bad = ~uniform_mask(X, Y, gamma, q_size).reshape(total, total)
    best = max_bpis(ConflictGraph.from_matrix(bad), budget=total)
    A = tuple(tuple(words[i].tolist()) for i in sorted(best.A))
    B = tuple(tuple(words[j].tolist()) for j in sorted(best.B))
    return UniformBiclique(A, B)
