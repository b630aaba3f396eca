"""Codes over a channel: success probability, zero-error checks, time sharing,
and an exhaustive zero-error sum-rate oracle for tiny blocklengths.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .channel import Channel, OutputWord, Word
from .errors import BudgetExceeded, ConstructionError, DomainError

DEFAULT_PAIR_BUDGET = 1 << 22
DEFAULT_WORD_BUDGET = 16


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float

    @property
    def sum(self) -> float:
        return self.r1 + self.r2


@dataclass
class Code:
    """Encoder tables plus optional explicit decoder maps.

    Decoders map an output word to a message index; outputs missing from a
    decoder count as decoding failures.  When a decoder is ``None`` it is
    rebuilt from the channel by :func:`majority_decoders`.
    """

    m1: int
    m2: int
    n: int
    enc1: list[Word]
    enc2: list[Word]
    dec1: dict[OutputWord, int] | None = None
    dec2: dict[OutputWord, int] | None = None

    def __post_init__(self):
        self.enc1 = [tuple(int(s) for s in w) for w in self.enc1]
        self.enc2 = [tuple(int(s) for s in w) for w in self.enc2]
        if self.m1 < 1 or self.m2 < 1:
            raise DomainError("message counts must be positive")
        if len(self.enc1) != self.m1 or len(self.enc2) != self.m2:
            raise DomainError("encoder tables must be total")
        for w in itertools.chain(self.enc1, self.enc2):
            if len(w) != self.n:
                raise DomainError(f"codeword {w} does not have blocklength {self.n}")

    @property
    def rate(self) -> RatePoint:
        return RatePoint(math.log2(self.m1) / self.n, math.log2(self.m2) / self.n)


@dataclass(frozen=True)
class CodebookPair:
    """Uncoded scheme: each source sends one of its codewords verbatim."""

    A: tuple[Word, ...]
    B: tuple[Word, ...]
    n: int = field(init=False)

    def __post_init__(self):
        a = tuple(sorted({tuple(int(s) for s in w) for w in self.A}))
        b = tuple(sorted({tuple(int(s) for s in w) for w in self.B}))
        if not a or not b:
            raise DomainError("codebooks must be non-empty")
        lengths = {len(w) for w in a + b}
        if len(lengths) != 1:
            raise DomainError("codebooks must share one blocklength")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "n", lengths.pop())

    @property
    def rate(self) -> RatePoint:
        return RatePoint(math.log2(len(self.A)) / self.n, math.log2(len(self.B)) / self.n)

    @property
    def sum_rate(self) -> float:
        return self.rate.sum

    def as_code(self, channel: Channel | None = None) -> Code:
        code = Code(len(self.A), len(self.B), self.n, list(self.A), list(self.B))
        if channel is not None:
            code.dec1, code.dec2 = majority_decoders(channel, code)
        return code


# -- evaluation ---------------------------------------------------------------

def _outputs(channel: Channel, code: Code, budget: int):
    if code.m1 * code.m2 > budget:
        raise BudgetExceeded(f"{code.m1 * code.m2} message pairs exceed budget {budget}")
    e1 = np.array(code.enc1, dtype=np.int64).reshape(code.m1, code.n)
    e2 = np.array(code.enc2, dtype=np.int64).reshape(code.m2, code.n)
    if e1.min() < 0 or e1.max() >= channel.q_size or e2.min() < 0 or e2.max() >= channel.q_size:
        raise DomainError("codeword symbol outside the channel alphabet")
    return channel.apply_block_array(e1[:, None, :], e2[None, :, :])


def majority_decoders(channel: Channel, code: Code, budget: int = DEFAULT_PAIR_BUDGET):
    """Per-terminal decoders choosing the most frequent message for each output.

    Ties go to the smaller message index.
    """
    out = _outputs(channel, code, budget)
    tallies = (defaultdict(Counter), defaultdict(Counter))
    for m1 in range(code.m1):
        for m2 in range(code.m2):
            tallies[0][tuple(out[m1, m2, :, 0].tolist())][m1] += 1
            tallies[1][tuple(out[m1, m2, :, 1].tolist())][m2] += 1
    decoders = []
    for tally in tallies:
        decoders.append({o: min(c, key=lambda m: (-c[m], m)) for o, c in tally.items()})
    return decoders[0], decoders[1]


def success_matrix(channel: Channel, code: Code, budget: int = DEFAULT_PAIR_BUDGET) -> np.ndarray:
    """Boolean ``(M1, M2)`` array: does message pair ``(m1, m2)`` decode at both terminals."""
    out = _outputs(channel, code, budget)
    dec1, dec2 = code.dec1, code.dec2
    if dec1 is None or dec2 is None:
        built1, built2 = majority_decoders(channel, code, budget)
        dec1 = built1 if dec1 is None else dec1
        dec2 = built2 if dec2 is None else dec2
    ok = np.zeros((code.m1, code.m2), dtype=bool)
    for m1 in range(code.m1):
        for m2 in range(code.m2):
            o1 = tuple(out[m1, m2, :, 0].tolist())
            o2 = tuple(out[m1, m2, :, 1].tolist())
            ok[m1, m2] = dec1.get(o1) == m1 and dec2.get(o2) == m2
    return ok


def success_probability(channel: Channel, code: Code,
                        budget: int = DEFAULT_PAIR_BUDGET) -> Fraction:
    """Exact fraction of uniformly drawn message pairs decoded correctly at both terminals."""
    ok = success_matrix(channel, code, budget)
    return Fraction(int(ok.sum()), code.m1 * code.m2)


@dataclass(frozen=True)
class Collision:
    """Two input pairs that one terminal cannot tell apart."""

    terminal: int
    x: Word
    y: Word
    x2: Word
    y2: Word


def find_collision(channel: Channel, A: Sequence[Word], B: Sequence[Word]) -> Collision | None:
    """First ambiguity in ``A x B``, or ``None`` when the pair is zero-error.

    Outputs of each terminal are grouped by value; a group is ambiguous when
    it holds pairs with different values of the coordinate that terminal must
    recover.
    """
    xa = np.unique(np.asarray(A, dtype=np.int64), axis=0)
    yb = np.unique(np.asarray(B, dtype=np.int64), axis=0)
    if xa.ndim != 2 or yb.ndim != 2 or xa.shape[1] != yb.shape[1]:
        raise DomainError("codebooks must be non-empty with a common blocklength")
    na, nb, n = xa.shape[0], yb.shape[0], xa.shape[1]
    out = channel.apply_block_array(xa[:, None, :], yb[None, :, :])
    owners = (np.repeat(np.arange(na), nb), np.tile(np.arange(nb), na))
    for terminal in (0, 1):
        rows = np.ascontiguousarray(out[..., terminal].reshape(na * nb, n))
        _, group = np.unique(rows, axis=0, return_inverse=True)
        group = group.reshape(-1)
        owner = owners[terminal]
        k = int(group.max()) + 1
        lo = np.full(k, np.iinfo(np.int64).max)
        hi = np.full(k, -1)
        np.minimum.at(lo, group, owner)
        np.maximum.at(hi, group, owner)
        bad = lo[group] != hi[group]
        if bad.any():
            p = int(np.argmax(bad))
            same = np.nonzero((group == group[p]) & (owner != owner[p]))[0]
            p2 = int(same[0])
            ia, ib = divmod(p, nb)
            ja, jb = divmod(p2, nb)
            return Collision(terminal + 1, tuple(xa[ia].tolist()), tuple(yb[ib].tolist()),
                             tuple(xa[ja].tolist()), tuple(yb[jb].tolist()))
    return None


def is_zero_error(channel: Channel, pair: CodebookPair) -> bool:
    return find_collision(channel, pair.A, pair.B) is None


# -- exhaustive oracle ---------------------------------------------------------

@dataclass(frozen=True)
class ZeroErrorOptimum:
    rate: RatePoint
    pair: CodebookPair


def all_words(q_size: int, n: int) -> list[Word]:
    """``[Q]^n`` in lexicographic order."""
    return list(itertools.product(range(q_size), repeat=n))


def _max_independent_set(candidates: int, adj: list[int]) -> int:
    """Lexicographically smallest maximum independent set, as a bitmask."""
    best = [0, 0]  # size, mask

    def grow(mask, cand, size):
        if cand == 0:
            if size > best[0]:
                best[0], best[1] = size, mask
            return
        if size + cand.bit_count() <= best[0]:
            return
        v = (cand & -cand).bit_length() - 1
        bit = 1 << v
        grow(mask | bit, cand & ~adj[v] & ~bit, size + 1)
        grow(mask, cand & ~bit, size)

    grow(0, candidates, 0)
    return best[1]


def exact_zero_error_sum_rate(channel: Channel, n: int,
                              word_budget: int = DEFAULT_WORD_BUDGET) -> ZeroErrorOptimum:
    """Maximum of ``(log|A| + log|B|)/n`` over zero-error codebook pairs.

    Searches ``A`` depth-first in lexicographic order; for each ``A`` the
    best ``B`` is a maximum independent set among the words compatible with
    ``A``.  Branches whose ``|A| * |compatible B|`` cannot beat the incumbent
    are cut.  Ties keep the lexicographically smallest witness.
    """
    if n < 1:
        raise DomainError("blocklength must be positive")
    words = all_words(channel.q_size, n)
    size = len(words)
    if size > word_budget:
        raise BudgetExceeded(f"Q^n = {size} exceeds word budget {word_budget}")
    arr = np.array(words, dtype=np.int64)
    out = channel.apply_block_array(arr[:, None, :], arr[None, :, :])
    base = channel.out_q + 1
    weights = base ** np.arange(n)[::-1]
    o1 = ((out[..., 0] + 1) * weights).sum(-1).tolist()
    o2 = ((out[..., 1] + 1) * weights).sum(-1).tolist()
    full = (1 << size) - 1
    best = {"product": 0, "A": None, "B": None}

    def best_b(A: list[int], compat: int) -> int:
        ys = [y for y in range(size) if compat >> y & 1]
        owner1 = {y: {o1[x][y]: x for x in A} for y in ys}
        vals2 = {y: {o2[x][y] for x in A} for y in ys}
        adj = [0] * size
        for i, y in enumerate(ys):
            for y2 in ys[i + 1:]:
                clash = not vals2[y].isdisjoint(vals2[y2])
                if not clash:
                    d2 = owner1[y2]
                    clash = any(d2.get(v, x) != x for v, x in owner1[y].items())
                if clash:
                    adj[y] |= 1 << y2
                    adj[y2] |= 1 << y
        return _max_independent_set(compat, adj)

    def visit(A: list[int], compat: int, start: int):
        if A:
            if len(A) * compat.bit_count() > best["product"]:
                bmask = best_b(A, compat)
                prod = len(A) * bmask.bit_count()
                if prod > best["product"]:
                    best.update(product=prod, A=list(A), B=bmask)
        for x in range(start, size):
            # y stays compatible only if x's terminal-1 outputs differ from every
            # earlier member's at that y
            new = compat
            for y in range(size):
                if new >> y & 1 and any(o1[x][y] == o1[x2][y] for x2 in A):
                    new &= ~(1 << y)
            if new == 0:
                continue
            if (len(A) + size - x) * new.bit_count() <= best["product"]:
                continue
            A.append(x)
            visit(A, new, x + 1)
            A.pop()

    visit([], full, 0)
    A = [words[i] for i in best["A"]]
    B = [words[y] for y in range(size) if best["B"] >> y & 1]
    pair = CodebookPair(tuple(A), tuple(B))
    return ZeroErrorOptimum(pair.rate, pair)


# -- time sharing ---------------------------------------------------------------

def time_share(channel: Channel, code: Code, budget: int = DEFAULT_PAIR_BUDGET) -> CodebookPair:
    """Fix the lower-rate user's message and keep the messages that still decode.

    The higher-rate user is user 1 unless ``M2 > M1``.  Candidate fixed
    messages are scanned in increasing order; the first one with the most
    surviving messages wins.  Every pair in the returned codebooks decodes
    correctly, so the result is zero-error.
    """
    ok = success_matrix(channel, code, budget)
    swapped = code.m2 > code.m1
    table = ok.T if swapped else ok          # rows: varying user, columns: fixed user
    counts = table.sum(axis=0)
    m_star = int(np.argmax(counts))
    if counts[m_star] == 0:
        raise ConstructionError("no message pair decodes; time sharing impossible",
                                {"success": 0})
    kept = np.nonzero(table[:, m_star])[0].tolist()
    if swapped:
        return CodebookPair((code.enc1[m_star],), tuple(code.enc2[m] for m in kept))
    return CodebookPair(tuple(code.enc1[m] for m in kept), (code.enc2[m_star],))


# -- text format ------------------------------------------------------------------

def dumps_code(code: Code) -> str:
    lines = [f"M1 {code.m1}", f"M2 {code.m2}", f"N {code.n}"]
    lines += [f"E1 {m} " + " ".join(map(str, w)) for m, w in enumerate(code.enc1)]
    lines += [f"E2 {m} " + " ".join(map(str, w)) for m, w in enumerate(code.enc2)]
    return "\n".join(lines) + "\n"


def loads_code(text: str) -> Code:
    header: dict[str, int] = {}
    enc: dict[str, dict[int, Word]] = {"E1": {}, "E2": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] in ("M1", "M2", "N"):
                header[parts[0]] = int(parts[1])
            elif parts[0] in enc:
                enc[parts[0]][int(parts[1])] = tuple(int(s) for s in parts[2:])
            else:
                raise DomainError(f"line {lineno}: unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"line {lineno}: malformed record {raw!r}") from None
    try:
        m1, m2, n = header["M1"], header["M2"], header["N"]
    except KeyError as missing:
        raise DomainError(f"code file lacks {missing.args[0]}") from None
    for key, m in (("E1", m1), ("E2", m2)):
        if sorted(enc[key]) != list(range(m)):
            raise DomainError(f"{key} table is not total over [{m}]")
    return Code(m1, m2, n, [enc["E1"][m] for m in range(m1)], [enc["E2"][m] for m in range(m2)])
