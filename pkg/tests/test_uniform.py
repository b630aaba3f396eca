import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zeroerr.bounds import binary_entropy
from zeroerr.errors import BudgetExceeded, DomainError
from zeroerr.families import ExplicitFamily
from zeroerr.uniform import (binary_map_is_balanced, binary_reduction, binary_uniform_pair,
                             diversity_gate, is_diverse_pair, is_diverse_pair_brute,
                             is_gamma_uniform_pair, is_gamma_uniform_sets,
                             max_uniform_biclique_exact, min_distinct_pairs, staircase_uniform_pair,
                             staircase_word, type_of, uniform_pair, uniform_spec)


def brute_type(x, y, q):
    c = Counter(zip(x, y))
    return [[c[(a, b)] for b in range(q)] for a in range(q)]


def brute_uniform(x, y, gamma, q):
    n = len(x)
    g = Fraction(gamma)
    lo, hi = (1 - g) * Fraction(n, q * q), (1 + g) * Fraction(n, q * q)
    return all(lo <= c <= hi for row in brute_type(x, y, q) for c in row)


def test_type_examples():
    assert type_of((0, 0, 1, 1), (0, 1, 0, 1), 2).tolist() == [[1, 1], [1, 1]]
    assert type_of((0, 1, 0, 1), (1, 1, 0, 0), 2).tolist() == [[1, 1], [1, 1]]
    with pytest.raises(DomainError):
        type_of((0, 1), (0,), 2)


@given(st.integers(2, 4), st.data())
def test_type_matches_tally(q, data):
    n = data.draw(st.integers(1, 12))
    x = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    t = type_of(x, y, q)
    assert t.tolist() == brute_type(x, y, q)
    assert t.sum() == n


def test_uniform_pair_examples():
    assert is_gamma_uniform_pair((0, 0, 1, 1), (0, 1, 0, 1), 0, 2)
    assert not is_gamma_uniform_pair((0,) * 4, (0,) * 4, 1, 2)
    # the window spans [0, n] once gamma reaches Q^2 - 1
    assert is_gamma_uniform_pair((0,) * 4, (0,) * 4, 3, 2)


def test_window_is_closed_and_exact():
    spec = uniform_spec(8, 2, Fraction(1, 2))
    assert (spec.lower, spec.upper) == (1, 3)
    assert spec.count_range == (1, 3)


@given(st.integers(2, 3), st.sampled_from([0, 0.25, 0.5, 1, 1.5]), st.data())
def test_uniform_pair_matches_reference(q, gamma, data):
    n = data.draw(st.integers(1, 18))
    x = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    assert is_gamma_uniform_pair(x, y, gamma, q) == brute_uniform(x, y, gamma, q)


def test_set_verdicts():
    A, B = binary_uniform_pair(8, 1)
    v = is_gamma_uniform_sets(A, B, 1)
    assert v.kind == "proved" and v.samples == A.cardinality * B.cardinality
    z = ExplicitFamily(2, [(0,) * 4])
    bad = is_gamma_uniform_sets(z, z, 0.5)
    assert bad.kind == "refuted" and bad.witness == ((0,) * 4, (0,) * 4)


def test_staircase_pair_audit():
    A, B = staircase_uniform_pair(3, 27, 1)
    v = is_gamma_uniform_sets(A, B, 1, audit_budget=100_000, seed=2)
    assert v.kind == "audited" and v.samples == 100_000


# -- diversity ------------------------------------------------------------------

def test_diversity_examples():
    zeros = (0,) * 6
    assert not is_diverse_pair(zeros, zeros, 0.5, 0.25, 2)
    assert is_diverse_pair((0, 0, 1, 1), (0, 1, 0, 1), 1, 0.75, 2)
    assert is_diverse_pair(zeros, zeros, 0.1, 0.9, 2)  # floor(0.6) = 0


def test_min_distinct_pairs_takes_frequent_pairs_first():
    x, y = (0, 0, 0, 1, 1, 2), (0, 0, 0, 1, 1, 2)
    assert [min_distinct_pairs(x, y, k, 3) for k in range(7)] == [0, 1, 1, 1, 2, 2, 3]


@given(st.integers(2, 3), st.data())
def test_diversity_greedy_matches_brute(q, data):
    n = data.draw(st.integers(1, 10))
    x = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    d = Fraction(data.draw(st.integers(0, n)), n)
    eps = Fraction(data.draw(st.integers(0, q * q)), q * q)
    assert is_diverse_pair(x, y, d, eps, q) == is_diverse_pair_brute(x, y, d, eps, q)


def test_diversity_gate():
    assert diversity_gate(1, 0.25, 0.1)
    assert not diversity_gate(1, 0.2, 0.1)
    assert diversity_gate(0, 0.01, 0)


@given(st.integers(2, 3), st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1)]),
       st.data())
def test_uniform_pairs_are_diverse(q, gamma, data):
    n = q * q * data.draw(st.integers(1, 4))
    eps = Fraction(data.draw(st.integers(0, q * q - 1)), q * q)
    # pick d = k/n just above (1 + gamma) eps so floor(dn) = k exactly
    k = math.floor((1 + gamma) * eps * n) + 1
    if k > n:
        return
    d = Fraction(k, n)
    x = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    y = data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))
    if is_gamma_uniform_pair(x, y, gamma, q):
        assert diversity_gate(gamma, d, eps)
        assert is_diverse_pair(x, y, d, eps, q)


# -- constructions ------------------------------------------------------------------

def test_binary_construction_sizes():
    A, B = binary_uniform_pair(4, 1e-9)
    assert (A.cardinality, B.cardinality) == (2, 4)
    with pytest.raises(DomainError):
        binary_uniform_pair(6, 0.5)


@pytest.mark.parametrize("n,gamma", [(8, 0.5), (8, 1), (12, 1.5)])
def test_binary_construction_proved_and_counted(n, gamma):
    A, B = binary_uniform_pair(n, gamma)
    r = math.floor(Fraction(gamma) * n / 4)
    assert A.cardinality == 2 * sum(math.comb(n, i) for i in range(r + 1))
    assert B.cardinality == math.comb(n // 2, n // 4) ** 2
    assert is_gamma_uniform_sets(A, B, gamma, audit_budget=10 ** 6).kind == "proved"


def test_binary_construction_beats_size_floor():
    for n in (8, 16, 32):
        A, B = binary_uniform_pair(n, 1)
        floor = 1 - math.log2(n) - math.log2(n + 1) + (1 + binary_entropy(0.25)) * n
        assert math.log2(A.cardinality * B.cardinality) > floor


def test_staircase_construction():
    assert staircase_word(3, 9) == (0, 0, 0, 1, 1, 1, 2, 2, 2)
    with pytest.warns(UserWarning):
        A, B = staircase_uniform_pair(3, 9, 1e-9)
    assert (A.cardinality, B.cardinality) == (1, 216)
    with pytest.raises(DomainError):
        staircase_uniform_pair(3, 10, 1)
    with pytest.raises(DomainError):
        staircase_uniform_pair(2, 8, 1)


def test_staircase_construction_proved_small():
    with pytest.warns(UserWarning):
        A, B = staircase_uniform_pair(3, 9, 1)
    assert is_gamma_uniform_sets(A, B, 1, audit_budget=10 ** 6).kind == "proved"


def test_dispatch():
    assert uniform_pair(2, 8, 1)[0].q_size == 2
    assert uniform_pair(4, 64, 1)[1].blocks == 4


def test_binary_reduction_keeps_uniformity():
    assert all(binary_map_is_balanced(q) for q in range(1, 6))
    A, B = uniform_pair(4, 64, 1)
    A2, B2 = binary_reduction(A, B, 2)
    assert (A2.n, A2.cardinality, B2.cardinality) == (128, A.cardinality, B.cardinality)
    assert is_gamma_uniform_sets(A2, B2, 1, audit_budget=20_000, seed=3).kind == "audited"
    with pytest.raises(DomainError):
        binary_reduction(*staircase_uniform_pair(3, 27, 1), 2)


@given(st.integers(0, 2 ** 16))
def test_binary_reduction_preserves_pair_uniformity(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.integers(4, size=8), rng.integers(4, size=8)
    gamma = Fraction(int(rng.integers(0, 8)), 4)
    img = binary_reduction(ExplicitFamily(4, [x]), ExplicitFamily(4, [y]), 2)[0]
    if is_gamma_uniform_pair(x, y, gamma, 4):
        assert is_gamma_uniform_pair(img.encode(x), img.encode(y), gamma, 2)


# -- exact biclique --------------------------------------------------------------------

def brute_uniform_biclique(q, n, gamma):
    words = list(itertools.product(range(q), repeat=n))
    best = 0
    for r in range(1, len(words) + 1):
        for A in itertools.combinations(words, r):
            ok = [y for y in words if all(brute_uniform(x, y, gamma, q) for x in A)]
            best = max(best, r * len(ok))
    return best


@pytest.mark.parametrize("gamma", [0, 1, 3])
def test_biclique_matches_brute_force(gamma):
    assert max_uniform_biclique_exact(2, 3, gamma).size == brute_uniform_biclique(2, 3, gamma)


def test_biclique_full_square_when_window_vacuous():
    assert max_uniform_biclique_exact(2, 4, 3).size == 256


def test_biclique_budget():
    with pytest.raises(BudgetExceeded):
        max_uniform_biclique_exact(2, 5, 1)


def test_construction_cardinalities_match_enumeration():
    import itertools as it
    A, B = binary_uniform_pair(8, 1)
    words = list(it.product(range(2), repeat=8))
    assert A.cardinality == sum(map(A.contains, words))
    assert B.cardinality == sum(map(B.contains, words))
    with pytest.warns(UserWarning):
        A3, B3 = staircase_uniform_pair(3, 9, 1)
    words3 = list(it.product(range(3), repeat=9))
    assert A3.cardinality == sum(map(A3.contains, words3))
    assert B3.cardinality == sum(map(B3.contains, words3)) == 216


@pytest.mark.parametrize("n", [8, 16, 32, 64])
@pytest.mark.parametrize("gamma", [0.5, 1, 1.5])
def test_binary_construction_under_upper_bound(n, gamma):
    from zeroerr.bounds import uniform_pair_upper_bound
    A, B = binary_uniform_pair(n, gamma)
    binomial, smooth = uniform_pair_upper_bound(n, 1, gamma)
    assert A.cardinality * B.cardinality <= min(binomial, smooth)
