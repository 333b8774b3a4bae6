from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from listdecode.code import (
    LinearCode,
    all_messages,
    codeword_matrix,
    draw_puncture_multiset,
    enumerate_codewords,
    format_gen,
    full_rank_probability,
    hamming_distance,
    load_gen,
    low_weight_count,
    min_distance,
    parse_gen,
    puncture,
    random_generator,
    rank_mod_q,
    reed_muller,
    restrict,
    save_gen,
    weight_profile,
    wozencraft,
    wozencraft_from_multipliers,
)
from listdecode.errors import LengthMismatch, SizeOverBudget, SymbolOutOfRange


def brute_rank(M: np.ndarray, q: int) -> int:
    """Rank as log_q of the number of distinct row combinations."""
    k = M.shape[0]
    span = {tuple((np.array(c) @ M) % q) for c in itertools.product(range(q), repeat=k)}
    r = 0
    while q**r < len(span):
        r += 1
    return r


def test_random_generator_shapes():
    c = random_generator(2, 1, 3, seed=9)
    words = {tuple(w) for w in codeword_matrix(c)}
    assert (0, 0, 0) in words and tuple(c.G[0]) in words
    assert codeword_matrix(random_generator(3, 2, 4, seed=1)).shape == (9, 4)


def test_random_generator_deterministic():
    assert random_generator(3, 3, 7, seed=42) == random_generator(3, 3, 7, seed=42)
    assert random_generator(3, 3, 7, seed=42) != random_generator(3, 3, 7, seed=43)


def test_hamming_distance_examples():
    assert hamming_distance([0, 1, 2], [0, 2, 2]) == (1, Fraction(1, 3))
    assert hamming_distance([1, 2], [1, 2]) == (0, Fraction(0))
    assert hamming_distance([0, 0], [1, 1]) == (2, Fraction(1))
    with pytest.raises(LengthMismatch):
        hamming_distance([0], [0, 1])


def test_enumeration_order_and_multiset():
    words = [c.symbols for c in enumerate_codewords(LinearCode(2, [[1, 0], [0, 1]]))]
    assert words == [(0, 0), (0, 1), (1, 0), (1, 1)]
    dup = codeword_matrix(LinearCode(2, [[1, 1], [0, 0]]))
    assert dup.shape == (4, 2)
    assert [tuple(w) for w in dup] == [(0, 0), (0, 0), (1, 1), (1, 1)]


def test_enumeration_messages_match_encode():
    code = random_generator(3, 3, 5, seed=2)
    for c in enumerate_codewords(code):
        assert tuple(code.encode(c.message)) == c.symbols


@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 6), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_linearity(q, k, n, seed):
    code = random_generator(q, k, n, seed)
    rng = np.random.default_rng(seed)
    x, y = rng.integers(0, q, k), rng.integers(0, q, k)
    a = int(rng.integers(0, q))
    assert np.array_equal(code.encode((a * x + y) % q), (a * code.encode(x) + code.encode(y)) % q)


def test_invalid_generators():
    with pytest.raises(SymbolOutOfRange):
        LinearCode(2, [[0, 2]])
    with pytest.raises(ValueError):
        LinearCode(4, [[1]])
    with pytest.raises(SizeOverBudget):
        codeword_matrix(LinearCode(2, np.ones((5, 3), dtype=int)), budget=16)


def test_reed_muller_parameters():
    rm13 = reed_muller(1, 3)
    assert (rm13.k, rm13.n) == (4, 8)
    rm24 = reed_muller(2, 4)
    assert (rm24.k, rm24.n) == (11, 16)
    rep = codeword_matrix(reed_muller(0, 3))
    assert {tuple(w) for w in rep} == {(0,) * 8, (1,) * 8}


def test_reed_muller_weights():
    rm13 = reed_muller(1, 3)
    assert weight_profile(rm13).counts == {0: 1, 4: 14, 8: 1}
    assert min_distance(rm13) == 4
    assert low_weight_count(rm13, 3) == 1
    assert low_weight_count(rm13, 4) == 15
    assert min_distance(reed_muller(2, 4)) == 4


@pytest.mark.parametrize("r,m", [(0, 3), (1, 3), (1, 4), (2, 4), (1, 5)])
def test_reed_muller_nesting_and_distance(r, m):
    small = {tuple(w) for w in codeword_matrix(reed_muller(r, m))}
    big = {tuple(w) for w in codeword_matrix(reed_muller(r + 1, m))}
    assert small <= big
    assert min_distance(reed_muller(r, m)) == 2 ** (m - r)
    assert rank_mod_q(reed_muller(r, m).G, 2) == reed_muller(r, m).k


def test_puncture_restriction():
    code = random_generator(3, 2, 4, seed=5)
    T = [2, 2]
    sub = restrict(code, T)
    full = codeword_matrix(code)
    assert np.array_equal(codeword_matrix(sub), full[:, T])
    p = puncture(reed_muller(2, 4), 64, seed=3)
    assert (p.q, p.k, p.n) == (2, 11, 64)


def test_puncture_matches_drawn_multiset():
    code = reed_muller(1, 4)
    T = draw_puncture_multiset(code.n, 10, seed=8)
    assert np.array_equal(puncture(code, 10, seed=8).G, code.G[:, T])


def test_identity_puncture_reproduces_mother():
    code = reed_muller(1, 3)
    assert restrict(code, range(code.n)) == code


def test_retain_puncture_keeps_subset():
    code = reed_muller(1, 4)
    p = puncture(code, 8, seed=1, retain=True)
    assert p.n <= code.n and p.k == code.k


def test_wozencraft_example():
    code = wozencraft_from_multipliers(2, [0b10], modulus=0b111)
    # x = 1 -> blocks (1, alpha) -> bits 10 01
    assert code.G[0].tolist() == [1, 0, 0, 1]
    assert np.array_equal(code.encode([0, 0]), np.zeros(4, dtype=int))


def test_wozencraft_is_systematic():
    code = wozencraft(4, 3, seed=11)
    assert (code.k, code.n) == (4, 16)
    assert np.array_equal(code.G[:, :4], np.eye(4, dtype=int))


def test_full_rank_probability_examples():
    assert full_rank_probability(2, 2, 3) == Fraction(21, 32)
    assert full_rank_probability(2, 3, 5) == Fraction(3255, 4096)
    assert full_rank_probability(2, 2, 2) == Fraction(3, 8)
    assert full_rank_probability(3, 1, 4) == 1 - Fraction(1, 81)
    assert full_rank_probability(2, 3, 2) == 0


@given(st.sampled_from([2, 3]), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_rank_matches_span_size(q, k, n, seed):
    M = np.random.default_rng(seed).integers(0, q, size=(k, n))
    assert rank_mod_q(M, q) == brute_rank(M, q)


def test_exact_rank_frequency_small():
    # every 2x2 binary matrix: 6 of 16 are invertible
    count = sum(
        rank_mod_q(np.array(bits).reshape(2, 2), 2) == 2 for bits in itertools.product(range(2), repeat=4)
    )
    assert Fraction(count, 16) == full_rank_probability(2, 2, 2)


def test_all_messages_order():
    assert all_messages(3, 2).tolist()[:4] == [[0, 0], [0, 1], [0, 2], [1, 0]]


def test_gen_round_trip(tmp_path):
    code = random_generator(5, 3, 6, seed=4)
    assert parse_gen(format_gen(code)) == code
    path = tmp_path / "c.gen"
    save_gen(code, path)
    assert load_gen(path) == code
    assert path.read_text().splitlines()[0] == "5 3 6"


@pytest.mark.parametrize(
    "text",
    ["", "2 1 2\n1\n", "2 2 2\n1 0\n", "2 1 2\n1 2\n", "4 1 1\n1\n", "x y z\n"],
)
def test_gen_parse_errors(text):
    with pytest.raises(ValueError):
        parse_gen(text)
