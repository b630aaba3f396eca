"""Intensional subsets of ``[Q]^n``.

A family knows its exact cardinality, answers membership, draws seeded
uniform samples and, when small enough, lists its members.  Samples are
``(count, n)`` int64 arrays.

Descriptor lines::

    FAMILY hamming_ball <Q> <n> center <word> [center <word> ...] radius <r>
    FAMILY block_balanced <Q> <n> [blocks <k>]
    FAMILY explicit <Q> <n>          followed by one word per line
    FAMILY binary <q> | <descriptor of the source family>

Words are written as digit strings when ``Q <= 10`` and comma-separated otherwise.
"""
from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, DomainError

DEFAULT_ENUM_BUDGET = 1 << 20


def format_word(word, q_size: int) -> str:
    symbols = [int(s) for s in word]
    return "".join(map(str, symbols)) if q_size <= 10 else ",".join(map(str, symbols))


def parse_word(token: str) -> tuple[int, ...]:
    if "," in token:
        return tuple(int(s) for s in token.split(","))
    return tuple(int(c) for c in token)


def hamming_distance(x, y) -> int:
    xa, ya = np.asarray(x), np.asarray(y)
    if xa.shape != ya.shape:
        raise DomainError(f"length mismatch: {xa.size} vs {ya.size}")
    return int(np.count_nonzero(xa != ya))


class SetFamily:
    q_size: int
    n: int

    @property
    def cardinality(self) -> int:
        raise NotImplementedError

    def contains(self, word) -> bool:
        raise NotImplementedError

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _iter_words(self) -> Iterator[tuple[int, ...]]:
        raise NotImplementedError

    def enumerate(self, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray | None:
        """All members in a fixed order, or ``None`` if there are more than ``budget``."""
        if self.cardinality > budget:
            return None
        words = list(self._iter_words())
        return np.array(words, dtype=np.int64).reshape(len(words), self.n)

    def descriptor(self) -> str:
        raise NotImplementedError

    def _check_word(self, word) -> np.ndarray | None:
        arr = np.asarray(word, dtype=np.int64)
        if arr.shape != (self.n,) or arr.min() < 0 or arr.max() >= self.q_size:
            return None
        return arr


def _ball_weights(n: int, q_size: int, radius: int) -> list[int]:
    return [math.comb(n, i) * (q_size - 1) ** i for i in range(radius + 1)]


class HammingBallUnion(SetFamily):
    """Union of disjoint Hamming balls of a common radius."""

    def __init__(self, q_size: int, centers: Sequence, radius: int):
        centers = [tuple(int(s) for s in c) for c in centers]
        if not centers:
            raise DomainError("at least one center is required")
        n = len(centers[0])
        if any(len(c) != n for c in centers) or radius < 0:
            raise DomainError("centers must share one length and radius must be >= 0")
        for c1, c2 in itertools.combinations(centers, 2):
            if hamming_distance(c1, c2) <= 2 * radius:
                raise DomainError("balls overlap; cardinality would not be additive")
        self.q_size, self.n = q_size, n
        self.centers = centers
        self.radius = min(radius, n)
        self._centers = np.array(centers, dtype=np.int64)
        self._weights = _ball_weights(n, q_size, self.radius)

    @property
    def ball_size(self) -> int:
        return sum(self._weights)

    @property
    def cardinality(self) -> int:
        return len(self.centers) * self.ball_size

    def contains(self, word) -> bool:
        arr = self._check_word(word)
        if arr is None:
            return False
        return bool((self._centers != arr).sum(axis=1).min() <= self.radius)

    def sample(self, count, rng):
        which = rng.integers(len(self.centers), size=count)
        total = self.ball_size
        cum = np.cumsum(self._weights)
        if total < 2 ** 62:
            u = rng.integers(total, size=count)
            radii = np.searchsorted(cum, u, side="right")
        else:
            probs = np.array([w / total for w in self._weights])
            radii = rng.choice(len(self._weights), size=count, p=probs / probs.sum())
        ranks = np.argsort(np.argsort(rng.random((count, self.n)), axis=1), axis=1)
        flip = ranks < radii[:, None]
        shift = rng.integers(1, self.q_size, size=(count, self.n))
        return (self._centers[which] + flip * shift) % self.q_size

    def _iter_words(self):
        for center in self.centers:
            for r in range(self.radius + 1):
                for pos in itertools.combinations(range(self.n), r):
                    for shifts in itertools.product(range(1, self.q_size), repeat=r):
                        w = list(center)
                        for p, s in zip(pos, shifts):
                            w[p] = (w[p] + s) % self.q_size
                        yield tuple(w)

    def descriptor(self):
        parts = [f"FAMILY hamming_ball {self.q_size} {self.n}"]
        parts += [f"center {format_word(c, self.q_size)}" for c in self.centers]
        parts.append(f"radius {self.radius}")
        return " ".join(parts)


def _multiset_permutations(counts: list[int]) -> Iterator[tuple[int, ...]]:
    """Distinct arrangements of a multiset with ``counts[s]`` copies of symbol ``s``, in lex order."""
    total = sum(counts)
    if total == 0:
        yield ()
        return
    for s, c in enumerate(counts):
        if c:
            counts[s] -= 1
            for rest in _multiset_permutations(counts):
                yield (s,) + rest
            counts[s] += 1


class BlockBalanced(SetFamily):
    """Words whose every block of length ``n/blocks`` holds each symbol equally often."""

    def __init__(self, q_size: int, n: int, blocks: int):
        if blocks < 1 or n % blocks:
            raise DomainError(f"n={n} is not divisible into {blocks} blocks")
        block_len = n // blocks
        if block_len % q_size:
            raise DomainError(f"block length {block_len} is not divisible by Q={q_size}")
        self.q_size, self.n, self.blocks = q_size, n, blocks
        self.block_len = block_len
        self.per_symbol = block_len // q_size

    @property
    def cardinality(self) -> int:
        per_block = math.factorial(self.block_len) // math.factorial(self.per_symbol) ** self.q_size
        return per_block ** self.blocks

    def contains(self, word) -> bool:
        arr = self._check_word(word)
        if arr is None:
            return False
        counts = np.stack([np.bincount(b, minlength=self.q_size)
                           for b in arr.reshape(self.blocks, self.block_len)])
        return bool(np.all(counts == self.per_symbol))

    def sample(self, count, rng):
        base = np.repeat(np.arange(self.q_size, dtype=np.int64), self.per_symbol)
        tiled = np.tile(base, (count, self.blocks, 1))
        return rng.permuted(tiled, axis=2).reshape(count, self.n)

    def _iter_words(self):
        block = list(_multiset_permutations([self.per_symbol] * self.q_size))
        for combo in itertools.product(block, repeat=self.blocks):
            yield tuple(itertools.chain.from_iterable(combo))

    def descriptor(self):
        return f"FAMILY block_balanced {self.q_size} {self.n} blocks {self.blocks}"


class ExplicitFamily(SetFamily):
    def __init__(self, q_size: int, words):
        uniq = sorted({tuple(int(s) for s in w) for w in words})
        if not uniq:
            raise DomainError("explicit family must be non-empty")
        lengths = {len(w) for w in uniq}
        if len(lengths) != 1:
            raise DomainError("words must share one length")
        self.q_size, self.n = q_size, lengths.pop()
        self.words = uniq
        self._set = set(uniq)
        arr = np.array(uniq, dtype=np.int64)
        if arr.min() < 0 or arr.max() >= q_size:
            raise DomainError(f"symbols must lie in [0, {q_size})")
        self._arr = arr

    @property
    def cardinality(self) -> int:
        return len(self.words)

    def contains(self, word) -> bool:
        return tuple(int(s) for s in word) in self._set

    def sample(self, count, rng):
        return self._arr[rng.integers(len(self.words), size=count)]

    def _iter_words(self):
        return iter(self.words)

    def descriptor(self):
        lines = [f"FAMILY explicit {self.q_size} {self.n}"]
        lines += [format_word(w, self.q_size) for w in self.words]
        return "\n".join(lines)


def binary_map(q: int) -> np.ndarray:
    """``(2^q, q)`` table of big-endian binary representations."""
    symbols = np.arange(2 ** q, dtype=np.int64)
    return (symbols[:, None] >> np.arange(q - 1, -1, -1)) & 1


class BinaryImage(SetFamily):
    """Image of a family over ``[2^q]^n`` under symbol-wise binary representation."""

    def __init__(self, source: SetFamily, q: int):
        if source.q_size != 2 ** q:
            raise DomainError(f"source alphabet {source.q_size} is not 2^{q}")
        self.source, self.bits = source, q
        self.q_size, self.n = 2, source.n * q
        self._table = binary_map(q)
        self._weights = 1 << np.arange(q - 1, -1, -1)

    def encode(self, words: np.ndarray) -> np.ndarray:
        words = np.asarray(words, dtype=np.int64)
        return self._table[words].reshape(*words.shape[:-1], self.n)

    def decode(self, words: np.ndarray) -> np.ndarray:
        words = np.asarray(words, dtype=np.int64)
        grouped = words.reshape(*words.shape[:-1], self.source.n, self.bits)
        return grouped @ self._weights

    @property
    def cardinality(self) -> int:
        return self.source.cardinality

    def contains(self, word) -> bool:
        arr = self._check_word(word)
        return arr is not None and self.source.contains(self.decode(arr))

    def sample(self, count, rng):
        return self.encode(self.source.sample(count, rng))

    def _iter_words(self):
        for w in self.source._iter_words():
            yield tuple(self.encode(np.array(w)).tolist())

    def descriptor(self):
        return f"FAMILY binary {self.bits} | {self.source.descriptor()}"


def parse_family(text: str) -> SetFamily:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("FAMILY "):
        raise DomainError("descriptor must start with a FAMILY line")
    head = lines[0].split()
    kind = head[1]
    try:
        if kind == "binary":
            q = int(head[2])
            inner = lines[0].split("|", 1)[1].strip()
            return BinaryImage(parse_family("\n".join([inner] + lines[1:])), q)
        q_size, n = int(head[2]), int(head[3])
        if kind == "hamming_ball":
            tokens = head[4:]
            centers, radius = [], None
            for key, value in zip(tokens[::2], tokens[1::2]):
                if key == "center":
                    centers.append(parse_word(value))
                elif key == "radius":
                    radius = int(value)
            if radius is None:
                raise DomainError("hamming_ball descriptor lacks a radius")
            fam = HammingBallUnion(q_size, centers, radius)
        elif kind == "block_balanced":
            opts = dict(zip(head[4::2], head[5::2]))
            fam = BlockBalanced(q_size, n, int(opts.get("blocks", 1)))
        elif kind == "explicit":
            fam = ExplicitFamily(q_size, [parse_word(ln) for ln in lines[1:]])
        else:
            raise DomainError(f"unknown family kind {kind!r}")
    except (IndexError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed descriptor {lines[0]!r}") from None
    if fam.n != n:
        raise DomainError(f"descriptor length {n} does not match family length {fam.n}")
    return fam


def materialize_or_sample(family: SetFamily, cap: int, rng: np.random.Generator) -> np.ndarray:
    """Every member when the family has at most ``cap`` of them, else ``cap`` seeded draws."""
    if family.cardinality <= cap:
        words = family.enumerate(budget=cap)
        order = rng.permutation(len(words))
        return words[order]
    return family.sample(cap, rng)


def require_enumerable(family: SetFamily, budget: int) -> np.ndarray:
    words = family.enumerate(budget)
    if words is None:
        raise BudgetExceeded(f"family of size {family.cardinality} exceeds budget {budget}")
    return words
