"""Deterministic two-user interference channels.

A channel maps an input pair ``(x, y)`` in ``[Q]^2`` to the pair of symbols
delivered to the two terminals. Symbols are 0-based. The erasure symbol is
represented by ``PHI = -1`` and an erased entry delivers ``PHI`` to *both*
terminals.

Random erasure/identity channels are drawn with numpy's ``PCG64`` bit
generator (``numpy.random.default_rng(seed)``): one ``random()`` double per
entry, traversed row-major over ``(x, y)``, and the entry is erased iff the
draw is ``< eps``.  The same ``(q_size, eps, seed)`` therefore always yields
the same table on every platform numpy supports.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

PHI = -1
ERASURE = (PHI, PHI)

Word = tuple[int, ...]
OutputWord = tuple[int, ...]


def is_erasure(output) -> bool:
    return output[0] == PHI


class Channel:
    """Single-letter channel table ``W: [Q]^2 -> [OUTQ]^2 ∪ {(φ, φ)}``.

    ``table[x, y] = (W1(x, y), W2(x, y))``; the array is read-only.
    """

    __slots__ = ("q_size", "out_q", "name", "_table")

    def __init__(self, table, out_q: int | None = None, name: str | None = None):
        arr = np.array(table, dtype=np.int16)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
            raise DomainError(f"channel table must have shape (Q, Q, 2), got {arr.shape}")
        q_size = arr.shape[0]
        if q_size < 2:
            raise DomainError("Q must be at least 2")
        out_q = q_size if out_q is None else int(out_q)
        erased = arr[..., 0] == PHI
        if np.any((arr[..., 1] == PHI) != erased):
            raise DomainError("erasure must reach both terminals at once")
        live = arr[~erased]
        if live.size and (live.min() < 0 or live.max() >= out_q):
            raise DomainError(f"output symbols must lie in [0, {out_q})")
        arr.setflags(write=False)
        self.q_size = q_size
        self.out_q = out_q
        self.name = name
        self._table = arr

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, q_size: int) -> "Channel":
        return cls.from_erasures(q_size, (), name=f"identity({q_size})")

    @classmethod
    def from_erasures(cls, q_size: int, erased: Iterable[tuple[int, int]],
                      name: str | None = None) -> "Channel":
        if q_size < 2:
            raise DomainError("Q must be at least 2")
        xs, ys = np.meshgrid(np.arange(q_size), np.arange(q_size), indexing="ij")
        table = np.stack([xs, ys], axis=-1)
        for x, y in erased:
            _check_symbol(x, q_size)
            _check_symbol(y, q_size)
            table[x, y] = ERASURE
        return cls(table, name=name)

    @classmethod
    def from_mask(cls, mask, name: str | None = None) -> "Channel":
        """Erasure/identity channel whose erased entries are ``mask[x, y]``."""
        mask = np.asarray(mask, dtype=bool)
        return cls.from_erasures(mask.shape[0], zip(*np.nonzero(mask)), name=name)

    # -- queries ------------------------------------------------------------

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def q_bits(self) -> float:
        """``log2 Q``; an integer-valued float when Q is a power of two."""
        return math.log2(self.q_size)

    @property
    def erasure_mask(self) -> np.ndarray:
        return self._table[..., 0] == PHI

    @property
    def erased_count(self) -> int:
        return int(self.erasure_mask.sum())

    def erased_pairs(self) -> list[tuple[int, int]]:
        return [(int(x), int(y)) for x, y in zip(*np.nonzero(self.erasure_mask))]

    def is_erasure_identity(self) -> bool:
        if self.out_q != self.q_size:
            return False
        xs, ys = np.meshgrid(np.arange(self.q_size), np.arange(self.q_size), indexing="ij")
        ident = (self._table[..., 0] == xs) & (self._table[..., 1] == ys)
        return bool(np.all(ident | self.erasure_mask))

    def apply(self, x: int, y: int) -> tuple[int, int]:
        _check_symbol(x, self.q_size)
        _check_symbol(y, self.q_size)
        a, b = self._table[x, y]
        return int(a), int(b)

    def apply_block(self, x: Sequence[int], y: Sequence[int]) -> tuple[OutputWord, OutputWord]:
        """Coordinatewise extension ``W^(n)``: returns the two terminals' words."""
        xa, ya = self._check_words(x, y)
        out = self._table[xa, ya]
        return tuple(int(v) for v in out[:, 0]), tuple(int(v) for v in out[:, 1])

    def apply_block_array(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorised ``W^(n)`` over broadcastable integer word arrays.

        Returns an array of shape ``broadcast(xs, ys).shape + (2,)``.
        """
        return self._table[xs, ys]

    def erased_fraction(self) -> Fraction:
        return Fraction(self.erased_count, self.q_size ** 2)

    def _check_words(self, x, y):
        xa = np.asarray(x, dtype=np.int64)
        ya = np.asarray(y, dtype=np.int64)
        if xa.ndim != 1 or ya.ndim != 1 or xa.size == 0:
            raise DomainError("words must be non-empty 1-d sequences")
        if xa.shape != ya.shape:
            raise DomainError(f"blocklength mismatch: {xa.size} vs {ya.size}")
        for arr in (xa, ya):
            if arr.min() < 0 or arr.max() >= self.q_size:
                raise DomainError(f"symbol out of range for Q={self.q_size}")
        return xa, ya

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return (self.q_size == other.q_size and self.out_q == other.out_q
                and np.array_equal(self._table, other._table))

    def __hash__(self):
        return hash((self.q_size, self.out_q, self._table.tobytes()))

    def __repr__(self):
        label = self.name or "channel"
        return f"<Channel {label} Q={self.q_size} erased={self.erased_count}>"


def _check_symbol(s, q_size):
    if not (0 <= int(s) < q_size):
        raise DomainError(f"symbol {s} out of range for Q={q_size}")


def sample_erasure_identity(q_size: int, eps: float, seed) -> Channel:
    """Draw ``W`` from the ensemble erasing each input pair independently w.p. ``eps``.

    ``seed`` is anything ``numpy.random.default_rng`` accepts (an int, or a
    tuple of ints for derived streams).
    """
    if not (0.0 <= eps <= 1.0) or math.isnan(eps):
        raise DomainError(f"eps must lie in [0, 1], got {eps}")
    if q_size < 2:
        raise DomainError("Q must be at least 2")
    rng = np.random.default_rng(seed)
    draws = rng.random(q_size * q_size).reshape(q_size, q_size)
    return Channel.from_mask(draws < eps, name=f"sampled(Q={q_size},eps={eps},seed={seed})")


def minmax() -> Channel:
    """Binary channel with ``W1 = max`` and ``W2 = min``."""
    table = [[(max(x, y), min(x, y)) for y in range(2)] for x in range(2)]
    return Channel(table, name="minmax")


def butterfly() -> Channel:
    """End-to-end channel of the butterfly network with one-bit sources.

    Terminal 1 (which wants ``x``) sees the bit pair ``(y, x ^ y)``, terminal 2
    sees ``(x, x ^ y)``; a bit pair ``(u, v)`` is encoded as the symbol
    ``2u + v``, so the output alphabet has four symbols.
    """
    table = [[(2 * y + (x ^ y), 2 * x + (x ^ y)) for y in range(2)] for x in range(2)]
    return Channel(table, out_q=4, name="butterfly")


def builtin(name: str) -> Channel:
    """Look up a named channel: ``identity(Q)``, ``minmax`` or ``butterfly``."""
    key = name.strip().lower()
    if key == "minmax":
        return minmax()
    if key == "butterfly":
        return butterfly()
    if key.startswith("identity(") and key.endswith(")"):
        try:
            q_size = int(key[len("identity("):-1])
        except ValueError:
            raise DomainError(f"bad identity size in {name!r}") from None
        return Channel.identity(q_size)
    raise DomainError(f"unknown channel {name!r}")


# -- text format -------------------------------------------------------------
#
#   Q <int>
#   OUTQ <int>            (optional)
#   NAME <text>           (optional)
#   ERASE <x> <y>         (erased entry)
#   MAP <x> <y> <a> <b>   (non-identity, non-erased entry)
#
# Entries not listed are the identity.

def dumps(channel: Channel) -> str:
    lines = [f"Q {channel.q_size}"]
    if channel.out_q != channel.q_size:
        lines.append(f"OUTQ {channel.out_q}")
    if channel.name:
        lines.append(f"NAME {channel.name}")
    q = channel.q_size
    for x in range(q):
        for y in range(q):
            a, b = (int(v) for v in channel.table[x, y])
            if a == PHI:
                lines.append(f"ERASE {x} {y}")
            elif (a, b) != (x, y):
                lines.append(f"MAP {x} {y} {a} {b}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Channel:
    q_size = out_q = None
    name = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        fields = rest.split()
        try:
            if head == "Q":
                q_size = int(fields[0])
            elif head == "OUTQ":
                out_q = int(fields[0])
            elif head == "NAME":
                name = rest.strip()
            elif head == "ERASE":
                x, y = map(int, fields)
                entries.append((x, y, PHI, PHI))
            elif head == "MAP":
                x, y, a, b = map(int, fields)
                entries.append((x, y, a, b))
            else:
                raise DomainError(f"line {lineno}: unknown record {head!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"line {lineno}: malformed record {line!r}") from None
    if q_size is None:
        raise DomainError("channel file lacks a Q line")
    if q_size < 2:
        raise DomainError("Q must be at least 2")
    xs, ys = np.meshgrid(np.arange(q_size), np.arange(q_size), indexing="ij")
    table = np.stack([xs, ys], axis=-1)
    for x, y, a, b in entries:
        _check_symbol(x, q_size)
        _check_symbol(y, q_size)
        table[x, y] = (a, b)
    return Channel(table, out_q=out_q, name=name)


def read_channel(path) -> Channel:
    with open(path) as fh:
        return loads(fh.read())


def write_channel(channel: Channel, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(channel))
