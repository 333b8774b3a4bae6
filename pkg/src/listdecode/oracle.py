"""Exhaustive ground truth for list decodability.

The worst-case list size at radius ``t`` is the largest number of codewords
(counted with multiplicity) within Hamming distance ``t`` of any received
word.  For a linear code the distances from ``w`` to the code form the same
multiset for every word of the coset ``w + C``, so the ``coset`` method only
visits one representative per coset: the words supported on the non-pivot
coordinates of the reduced generator.  The multiset of distances is also
invariant when the generator is rank-deficient (translating by a codeword
permutes the messages), so the same transversal of the row space works there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from listdecode.code import (
    DEFAULT_ENUM_BUDGET,
    LinearCode,
    check_budget,
    codeword_matrix,
    distance_matrix,
    rref_mod_q,
    span_rows,
)
from listdecode.errors import LengthMismatch
from listdecode.simplex import encode_words

# Cap on (received words) x (codewords) distance evaluations per search.
DEFAULT_PAIR_BUDGET = 2**30
_CHUNK_PAIRS = 1 << 22

Method = Literal["coset", "exhaustive"]


@dataclass(frozen=True)
class ListDecodingReport:
    t: int
    max_list: int
    witness: tuple[int, ...]
    method: Method

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "max_list": self.max_list,
            "witness": list(self.witness),
            "method": self.method,
        }


@dataclass(frozen=True)
class ListProfile:
    """Worst-case list sizes for every radius ``0..n`` from a single search."""

    max_list: np.ndarray
    witnesses: np.ndarray
    method: Method

    def report(self, t: int) -> ListDecodingReport:
        t = min(max(t, 0), self.max_list.size - 1)
        return ListDecodingReport(
            t, int(self.max_list[t]), tuple(int(s) for s in self.witnesses[t]), self.method
        )


def _check_radius(code: LinearCode, t: int) -> None:
    if not 0 <= t <= code.n:
        raise ValueError(f"radius must lie in 0..{code.n}, got {t}")


def list_size_at(
    code: LinearCode, w: Sequence[int], t: int, budget: int = DEFAULT_ENUM_BUDGET
) -> int:
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (code.n,):
        raise LengthMismatch(f"received word must have length {code.n}")
    _check_radius(code, t)
    C = codeword_matrix(code, budget)
    return int(np.count_nonzero(np.count_nonzero(C != w, axis=1) <= t))


def coset_leaders_basis(code: LinearCode) -> np.ndarray:
    """Unit vectors on the coordinates that are not pivots of the reduced generator.

    Their span meets every coset of the row space exactly once.  A
    rank-deficient generator just has fewer pivots, so more cosets.
    """
    _, pivots = rref_mod_q(code.G, code.q)
    pivot_set = set(pivots)
    free = [j for j in range(code.n) if j not in pivot_set]
    basis = np.zeros((len(free), code.n), dtype=np.int64)
    basis[np.arange(len(free)), free] = 1
    return basis


def _received_words(code: LinearCode, method: Method, budget: int) -> tuple[np.ndarray, Method]:
    if method == "coset":
        basis = coset_leaders_basis(code)
        check_budget("cosets", code.q ** basis.shape[0], budget)
        if basis.shape[0] == 0:
            return np.zeros((1, code.n), dtype=np.int64), "coset"
        return span_rows(basis, code.q), "coset"
    if method != "exhaustive":
        raise ValueError(f"unknown method {method!r}")
    check_budget("received words", code.q**code.n, budget)
    return span_rows(np.eye(code.n, dtype=np.int64), code.q), "exhaustive"


def _best_rows(D: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """For each radius, the first row of ``D`` with the most entries <= radius, and that count."""
    m = D.shape[0]
    idx = D * m + np.arange(m)[:, None]
    counts = np.bincount(idx.ravel(), minlength=(n + 1) * m).reshape(n + 1, m)
    for t in range(1, n + 1):
        counts[t] += counts[t - 1]
    top = counts.argmax(axis=1)
    return top, counts[np.arange(n + 1), top]


def list_profile(
    code: LinearCode,
    method: Method = "coset",
    budget: int = DEFAULT_ENUM_BUDGET,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> ListProfile:
    """Worst-case list size and lexicographically least witness for every radius."""
    if code.q == 2 and code.n <= 62:
        return _binary_profile(code, method, budget, pair_budget)
    C = codeword_matrix(code, budget)
    W, used = _received_words(code, method, budget)
    check_budget("distance evaluations", W.shape[0] * C.shape[0], pair_budget)
    n = code.n
    best = np.zeros(n + 1, dtype=np.int64)
    wit = np.zeros((n + 1, n), dtype=np.int64)
    step = max(1, _CHUNK_PAIRS // C.shape[0])
    for lo in range(0, W.shape[0], step):
        block = W[lo : lo + step]
        D = distance_matrix(block, C, code.q)
        top, vals = _best_rows(D, n)
        better = vals > best
        best[better] = vals[better]
        wit[better] = block[top[better]]
    return ListProfile(best, wit, used)


def _pack(words: np.ndarray) -> np.ndarray:
    """Binary words as integers, first coordinate most significant (lex order = int order)."""
    n = words.shape[1]
    place = np.left_shift(np.uint64(1), np.arange(n - 1, -1, -1, dtype=np.uint64))
    return (words.astype(np.uint64) * place).sum(axis=1, dtype=np.uint64)


def _unpack(x: int, n: int) -> np.ndarray:
    return np.array([(x >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.int64)


def _binary_profile(code: LinearCode, method: Method, budget: int, pair_budget: int) -> ListProfile:
    """Bit-packed version of :func:`list_profile` for binary codes of length <= 62."""
    n = code.n
    if method == "coset":
        free = np.flatnonzero(coset_leaders_basis(code).any(axis=0))
    elif method == "exhaustive":
        free = np.arange(n)
    else:
        raise ValueError(f"unknown method {method!r}")
    check_budget("cosets" if method == "coset" else "received words", 1 << free.size, budget)
    C = _pack(codeword_matrix(code, budget))
    check_budget("distance evaluations", (1 << free.size) * C.size, pair_budget)
    best = np.zeros(n + 1, dtype=np.int64)
    wit = np.zeros(n + 1, dtype=np.uint64)
    f = free.size
    step = max(1, _CHUNK_PAIRS // C.size)
    for lo in range(0, 1 << f, step):
        i = np.arange(lo, min(lo + step, 1 << f), dtype=np.uint64)
        W = np.zeros(i.size, dtype=np.uint64)
        # bit f-1-b of the counter goes to coordinate free[b], keeping lex order
        for b, j in enumerate(free):
            W |= ((i >> np.uint64(f - 1 - b)) & np.uint64(1)) << np.uint64(n - 1 - int(j))
        D = np.bitwise_count(W[:, None] ^ C[None, :]).astype(np.int64)
        top, vals = _best_rows(D, n)
        better = vals > best
        best[better] = vals[better]
        wit[better] = W[top[better]]
    witnesses = np.stack([_unpack(int(x), n) for x in wit])
    return ListProfile(best, witnesses, method)


def worst_case_list_size(
    code: LinearCode,
    t: int,
    method: Method = "coset",
    budget: int = DEFAULT_ENUM_BUDGET,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> ListDecodingReport:
    _check_radius(code, t)
    return list_profile(code, method, budget, pair_budget).report(t)


@dataclass(frozen=True)
class DecodabilityResult:
    decodable: bool
    witness: tuple[int, ...] | None
    max_list: int

    def __bool__(self) -> bool:
        return self.decodable


def is_list_decodable(
    code: LinearCode,
    t: int,
    L: int,
    method: Method = "coset",
    budget: int = DEFAULT_ENUM_BUDGET,
) -> DecodabilityResult:
    """Whether every word has at most ``L`` codewords within distance ``t``."""
    rep = worst_case_list_size(code, t, method, budget)
    ok = rep.max_list <= L
    return DecodabilityResult(ok, None if ok else rep.witness, rep.max_list)


def char_equivalence_check(code: LinearCode, t: int, budget: int = DEFAULT_ENUM_BUDGET) -> bool:
    """Check that ``d(w, c) <= t`` iff ``<phi(w), phi(c)> >= (q-1)n - q t`` for all w, c.

    Distances are counted symbol by symbol and the inner products are summed
    in complex arithmetic, so neither side is derived from the other.
    """
    _check_radius(code, t)
    q, n = code.q, code.n
    check_budget("received words", q**n, budget)
    check_budget("distance evaluations", q**n * code.N, DEFAULT_PAIR_BUDGET)
    C = codeword_matrix(code, budget).astype(np.int64)
    EC = encode_words(q, C)
    threshold = (q - 1) * n - q * t
    W_all = span_rows(np.eye(n, dtype=np.int64), q)
    step = max(1, _CHUNK_PAIRS // (C.shape[0] * n))
    for lo in range(0, W_all.shape[0], step):
        W = W_all[lo : lo + step]
        inside = np.count_nonzero(W[:, None, :] != C[None, :, :], axis=2) <= t
        ip = (encode_words(q, W) @ EC.conj().T).real
        # inner products are integers spaced q apart
        close = ip >= threshold - 0.5
        if not np.array_equal(inside, close):
            return False
    return True
