"""Zero-error codes from near-uniform families by Hamming packing.

Pipeline: pick ``d = 2 eps (1 + gamma) + slack`` so that near-uniform pairs
are ``(d, 2 eps)``-diverse, draw words from each family, keep a greedy
packing with pairwise distance above ``floor(dn)``, and check the result
against a channel whose erased fraction is at most ``2 eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import bounds
from ._numbers import as_fraction, floor_times
from .channel import Channel, sample_erasure_identity
from .coding import Collision, find_collision
from .errors import ConstructionError, DomainError
from .families import (SetFamily, format_word, hamming_distance, materialize_or_sample,
                       parse_family, parse_word)

__all__ = [
    "hamming_distance", "greedy_pack", "PackedCode", "build_zero_error_code",
    "verify_zero_error_against", "sample_conditioned_channel", "packing_degree_bound",
]


def greedy_pack(words: Sequence, d) -> np.ndarray:
    """Scan ``words`` in order, keeping each one farther than ``floor(dn)`` from all kept words.

    The result is a maximal independent set of the graph joining words at
    distance ``<= floor(dn)``; ``d = 0`` simply removes duplicates.
    """
    arr = np.asarray(words, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DomainError("words must share one length")
    n = arr.shape[1]
    threshold = floor_times(d, n)
    kept = np.empty_like(arr)
    count = 0
    for w in arr:
        if count == 0 or (kept[:count] != w).sum(axis=1).min() > threshold:
            kept[count] = w
            count += 1
    return kept[:count].copy()


def packing_degree_bound(n: int, q_size: int, threshold: int) -> int:
    """``C(n, t) Q^t``: the neighbourhood-size bound behind the packing guarantee."""
    return math.comb(n, threshold) * q_size ** threshold


@dataclass
class PackedCode:
    q_size: int
    n: int
    A_prime: np.ndarray
    B_prime: np.ndarray
    d: Fraction
    threshold: int
    seed: int
    family_a: str = ""
    family_b: str = ""
    gamma: float | None = None
    eps: float | None = None
    slack: float | None = None
    drawn: tuple[int, int] = (0, 0)
    stats: dict = field(default_factory=dict)

    @property
    def rates(self) -> tuple[float, float]:
        return math.log2(len(self.A_prime)) / self.n, math.log2(len(self.B_prime)) / self.n

    @property
    def sum_rate(self) -> float:
        return sum(self.rates)

    def min_distances(self) -> tuple[int | None, int | None]:
        return _min_pairwise_distance(self.A_prime), _min_pairwise_distance(self.B_prime)

    def dumps(self) -> str:
        lines = ["PACKED", f"Q {self.q_size}", f"N {self.n}", f"SEED {self.seed}",
                 f"D {self.d}", f"THRESHOLD {self.threshold}"]
        if self.family_a:
            lines.append(f"FAMILY_A {_one_line(self.family_a)}")
        if self.family_b:
            lines.append(f"FAMILY_B {_one_line(self.family_b)}")
        lines += [f"A {format_word(w, self.q_size)}" for w in self.A_prime]
        lines += [f"B {format_word(w, self.q_size)}" for w in self.B_prime]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "PackedCode":
        fields: dict[str, str] = {}
        A, B = [], []
        for raw in text.splitlines():
            key, _, value = raw.strip().partition(" ")
            if key == "A":
                A.append(parse_word(value))
            elif key == "B":
                B.append(parse_word(value))
            elif key and key != "PACKED" and not key.startswith("#"):
                fields[key] = value
        try:
            q_size, n = int(fields["Q"]), int(fields["N"])
            code = cls(q_size, n, np.array(A, dtype=np.int64).reshape(len(A), n),
                       np.array(B, dtype=np.int64).reshape(len(B), n),
                       Fraction(fields["D"]), int(fields["THRESHOLD"]), int(fields["SEED"]),
                       _unfold(fields.get("FAMILY_A", "")), _unfold(fields.get("FAMILY_B", "")))
        except (KeyError, ValueError) as exc:
            raise DomainError(f"malformed packed code: {exc}") from None
        if not len(code.A_prime) or not len(code.B_prime):
            raise DomainError("packed code has an empty side")
        return code


def _one_line(descriptor: str) -> str:
    return descriptor.replace("\n", " ; ")


def _unfold(descriptor: str) -> str:
    return descriptor.replace(" ; ", "\n")


def _min_pairwise_distance(words: np.ndarray) -> int | None:
    if len(words) < 2:
        return None
    best = words.shape[1]
    for i in range(len(words) - 1):
        best = min(best, int((words[i + 1:] != words[i]).sum(axis=1).min()))
    return best


def build_zero_error_code(A: SetFamily, B: SetFamily, gamma, eps, slack, sample_cap: int = 256,
                          seed: int = 0, raw_d=None) -> PackedCode:
    """Pack seeded draws from a gamma-uniform pair into a zero-error code.

    ``d`` is ``2 eps (1 + gamma) + slack`` unless ``raw_d`` is given, in
    which case the diversity guarantee no longer applies.  Families small
    enough to list are shuffled in full instead of sampled.
    """
    if A.q_size != B.q_size or A.n != B.n:
        raise DomainError("families must share alphabet and length")
    if raw_d is None:
        if not as_fraction(slack) > 0:
            raise DomainError("slack must be positive")
        d = 2 * as_fraction(eps) * (1 + as_fraction(gamma)) + as_fraction(slack)
    else:
        d = as_fraction(raw_d)
    if not 0 <= d <= 1:
        raise DomainError(f"packing radius d={float(d):.4g} must lie in [0, 1]")
    n = A.n
    rng = np.random.default_rng(seed)
    draws_a = materialize_or_sample(A, sample_cap, rng)
    draws_b = materialize_or_sample(B, sample_cap, rng)
    packed_a, packed_b = greedy_pack(draws_a, d), greedy_pack(draws_b, d)
    threshold = floor_times(d, n)
    if len(packed_a) == 0 or len(packed_b) == 0:
        raise ConstructionError("packing left an empty side",
                                {"drawn": (len(draws_a), len(draws_b)), "threshold": threshold})
    code = PackedCode(A.q_size, n, packed_a, packed_b, d, threshold, seed,
                      A.descriptor(), B.descriptor(), gamma, eps, slack,
                      (len(draws_a), len(draws_b)))
    q = math.log2(A.q_size)
    delta1 = bounds.family_deficit(A.cardinality, q, n)
    delta2 = bounds.family_deficit(B.cardinality, q, n)
    code.stats = {
        "delta1": delta1,
        "delta2": delta2,
        "guaranteed_rate": bounds.diverse_code_rate(q, delta1, delta2, float(d)),
        "packing_floor_a": bounds.packing_guarantee(len(draws_a), n, A.q_size, d),
        "packing_floor_b": bounds.packing_guarantee(len(draws_b), n, B.q_size, d),
    }
    return code


@dataclass(frozen=True)
class CodeVerdict:
    ok: bool
    collision: Collision | None = None


def verify_zero_error_against(code: PackedCode, channel: Channel) -> CodeVerdict:
    if not channel.is_erasure_identity():
        raise DomainError("verification expects an erasure/identity channel")
    if channel.q_size != code.q_size:
        raise DomainError("channel and code alphabets differ")
    witness = find_collision(channel, code.A_prime, code.B_prime)
    return CodeVerdict(witness is None, witness)


def sample_conditioned_channel(q_size: int, eps: float, seed: int, max_fraction=None,
                               max_attempts: int = 10_000) -> tuple[Channel, int]:
    """Rejection-sample the random erasure channel until at most ``max_fraction`` is erased.

    ``max_fraction`` defaults to ``2 eps``.  Attempt ``k`` uses seed ``seed``
    for ``k = 0`` and the derived stream ``(seed, k)`` afterwards.  Returns
    the channel and the number of rejections.
    """
    limit = as_fraction(2 * as_fraction(eps) if max_fraction is None else max_fraction)
    for attempt in range(max_attempts):
        channel = sample_erasure_identity(q_size, eps, seed if attempt == 0 else (seed, attempt))
        if channel.erased_fraction() <= limit:
            return channel, attempt
    raise ConstructionError("no channel met the erasure limit",
                            {"attempts": max_attempts, "limit": float(limit)})
