import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zeroerr.channel import Channel, minmax, sample_erasure_identity
from zeroerr.codegen import (PackedCode, build_zero_error_code, greedy_pack,
                             packing_degree_bound, sample_conditioned_channel,
                             verify_zero_error_against)
from zeroerr.errors import ConstructionError, DomainError
from zeroerr.families import BlockBalanced, ExplicitFamily, HammingBallUnion
from zeroerr.uniform import uniform_pair

from conftest import all_binary_channels


def pairwise_min_distance(words):
    return min((int((a != b).sum()) for a, b in itertools.combinations(words, 2)), default=None)


def test_greedy_pack_hand_example():
    words = list(itertools.product(range(2), repeat=3))
    kept = greedy_pack(words, Fraction(1, 3))
    assert [tuple(w) for w in kept.tolist()] == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def test_greedy_pack_extremes():
    words = [(0, 1), (0, 1), (1, 1), (0, 0)]
    assert len(greedy_pack(words, 0)) == 3
    # distance must exceed floor(dn) = n, so only the first word survives
    assert greedy_pack(words, 1).tolist() == [[0, 1]]


@given(st.integers(2, 4), st.integers(1, 8), st.integers(0, 8), st.integers(0, 2 ** 16))
def test_greedy_pack_is_a_maximal_packing(q, n, k, seed):
    k = min(k, n)
    d = Fraction(k, n)
    words = np.random.default_rng(seed).integers(q, size=(30, n))
    kept = greedy_pack(words, d)
    md = pairwise_min_distance(kept)
    assert md is None or md > k
    for w in words:
        assert (kept != w).sum(axis=1).min() <= k  # every dropped word is blocked


def test_degree_bound():
    assert packing_degree_bound(10, 4, 2) == 45 * 16


def small_pair():
    return uniform_pair(4, 64, 1)


def test_build_code_radius_and_threshold():
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0.05, 0.01, seed=3)
    assert code.d == Fraction(21, 100) and code.threshold == 13
    assert len(code.A_prime) > 0 and len(code.B_prime) > 0
    da, db = code.min_distances()
    assert da is None or da > 13
    assert db is None or db > 13
    assert code.stats["guaranteed_rate"] == pytest.approx(
        2 * 2 * (1 - ((code.stats["delta1"] + code.stats["delta2"]) / 2 + 0.21)) - 2)


def test_build_code_is_seeded():
    A, B = small_pair()
    c1 = build_zero_error_code(A, B, 1, 0.05, 0.01, seed=9)
    c2 = build_zero_error_code(A, B, 1, 0.05, 0.01, seed=9)
    assert c1.dumps() == c2.dumps()


def test_no_erasure_packing_is_dedup():
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0, Fraction(1, 1000), seed=0)
    assert code.threshold == 0
    assert len(code.B_prime) == len({tuple(w) for w in code.B_prime.tolist()})
    assert verify_zero_error_against(code, Channel.identity(4)).ok


def test_build_code_domain_checks():
    A, B = small_pair()
    with pytest.raises(DomainError):
        build_zero_error_code(A, B, 1, 0.05, 0)
    with pytest.raises(DomainError):
        build_zero_error_code(A, BlockBalanced(4, 16, 1), 1, 0.05, 0.01)


def test_empty_pack_is_reported():
    class Empty(ExplicitFamily):
        cardinality = 0

        def enumerate(self, budget=0):
            return np.zeros((0, 2), dtype=np.int64)

    fam = ExplicitFamily(2, [(0, 0)])
    with pytest.raises(ConstructionError) as info:
        build_zero_error_code(Empty(2, [(0, 0)]), fam, 0, 0, 0.1)
    assert info.value.diagnostics["drawn"] == (0, 1)


def test_text_round_trip():
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0.05, 0.01, seed=4)
    back = PackedCode.loads(code.dumps())
    assert back.dumps() == code.dumps()
    assert (back.family_a, back.family_b) == (A.descriptor(), B.descriptor())


def test_malformed_code_file():
    with pytest.raises(DomainError):
        PackedCode.loads("PACKED\nQ 2\n")


def test_identity_channel_accepts_everything():
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0.05, 0.01, raw_d=0, seed=1)
    assert verify_zero_error_against(code, Channel.identity(4)).ok


def test_verify_rejects_mismatched_channels():
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0.05, 0.01)
    with pytest.raises(DomainError):
        verify_zero_error_against(code, Channel.identity(2))
    with pytest.raises(DomainError):
        verify_zero_error_against(code, minmax())


def test_zero_radius_code_collides_on_small_erased_channel():
    """Search Q=2, n=2 instances for a collision when the packing radius is dropped."""
    words = list(itertools.product(range(2), repeat=2))
    found = None
    for W in all_binary_channels():
        for A in itertools.combinations(words, 2):
            code = build_zero_error_code(ExplicitFamily(2, A), ExplicitFamily(2, words[:1]),
                                         0, 0, 0, raw_d=0)
            verdict = verify_zero_error_against(code, W)
            if not verdict.ok:
                found = (W, verdict.collision)
                break
        if found:
            break
    assert found is not None
    W, c = found
    t = c.terminal - 1
    assert W.apply_block(c.x, c.y)[t] == W.apply_block(c.x2, c.y2)[t]
    assert (c.x, c.y)[t] != (c.x2, c.y2)[t]


def test_conditioned_sampler():
    W, rejections = sample_conditioned_channel(4, 0.05, 0)
    assert W.erased_fraction() <= Fraction(1, 10)
    if rejections == 0:
        assert W == sample_erasure_identity(4, 0.05, 0)
    with pytest.raises(ConstructionError):
        sample_conditioned_channel(4, 1.0, 0, max_fraction=0.5, max_attempts=5)


@given(st.integers(0, 10 ** 6))
def test_conditioned_sampler_respects_limit(seed):
    W, _ = sample_conditioned_channel(4, 0.2, seed)
    assert W.erased_fraction() <= Fraction(2, 5)


def test_packed_cross_pairs_are_diverse():
    from zeroerr.uniform import is_diverse_pair
    A, B = small_pair()
    code = build_zero_error_code(A, B, 1, 0.05, 0.01, seed=5)
    rng = np.random.default_rng(0)
    for _ in range(500):
        x = code.A_prime[rng.integers(len(code.A_prime))]
        y = code.B_prime[rng.integers(len(code.B_prime))]
        assert is_diverse_pair(x, y, code.d, 2 * Fraction("0.05"), 4)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_packing_meets_degree_bound_on_full_family(k):
    fam = BlockBalanced(2, 8, 2)
    words = fam.enumerate()
    kept = greedy_pack(words, Fraction(k, 8))
    assert len(kept) * (packing_degree_bound(8, 2, k) + 1) >= len(words)
