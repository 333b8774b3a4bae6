"""Linear codes over prime fields and the ensembles built from them.

A :class:`LinearCode` is a generator matrix ``G`` over F_q.  Its codewords are
the multiset ``{xG : x in F_q^k}``: a rank-deficient ``G`` still has exactly
``q**k`` codewords, with repeats.  Messages are ordered lexicographically with
the first coordinate most significant, so message index ``i`` is the base-q
expansion of ``i`` and column ``i`` of the simplex matrix belongs to it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from os import PathLike
from typing import Iterator, Sequence

import numpy as np

from listdecode.errors import LengthMismatch, SizeOverBudget, SymbolOutOfRange
from listdecode.field import BinaryExtField, check_prime
from listdecode.seeding import make_rng

DEFAULT_ENUM_BUDGET = 2**24
# Cap on k*n generator entries for constructors.
DEFAULT_MATRIX_BUDGET = 2**26


def symbol_dtype(q: int) -> type:
    return np.uint8 if q <= 256 else np.int64


def check_budget(what: str, size: int, budget: int) -> None:
    if size > budget:
        raise SizeOverBudget(what, size, budget)


class LinearCode:
    """A q-ary linear code given by a ``k x n`` generator matrix.

    The matrix is copied and frozen on construction.
    """

    multiset_semantics = True

    def __init__(self, q: int, G: np.ndarray | Sequence[Sequence[int]]):
        check_prime(q)
        G = np.array(G, dtype=np.int64)
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
            raise ValueError(f"generator must be a nonempty 2-D matrix, got shape {G.shape}")
        if G.min() < 0 or G.max() >= q:
            raise SymbolOutOfRange(f"generator entries must lie in 0..{q - 1}")
        G.setflags(write=False)
        self.q = q
        self.G = G

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def N(self) -> int:
        return self.q**self.k

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def encode(self, message: Sequence[int]) -> np.ndarray:
        x = np.asarray(message, dtype=np.int64)
        if x.shape != (self.k,):
            raise LengthMismatch(f"message must have length {self.k}")
        return (x @ self.G) % self.q

    def message(self, index: int) -> np.ndarray:
        return index_to_message(index, self.q, self.k)

    def codeword(self, index: int) -> np.ndarray:
        return self.encode(self.message(index))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.G, other.G)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LinearCode(q={self.q}, k={self.k}, n={self.n})"


@dataclass(frozen=True)
class Codeword:
    symbols: tuple[int, ...]
    message: tuple[int, ...]


@dataclass(frozen=True)
class WeightProfile:
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def index_to_message(index: int, q: int, k: int) -> np.ndarray:
    digits = np.zeros(k, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        index, digits[j] = divmod(index, q)
    if index:
        raise ValueError("message index out of range")
    return digits


def message_to_index(message: Sequence[int], q: int) -> int:
    index = 0
    for d in message:
        index = index * q + int(d)
    return index


def all_messages(q: int, k: int, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All of F_q^k as rows, in lexicographic order."""
    check_budget("messages", q**k, budget)
    idx = np.arange(q**k, dtype=np.int64)
    out = np.empty((q**k, k), dtype=symbol_dtype(q))
    for j in range(k - 1, -1, -1):
        idx, out[:, j] = np.divmod(idx, q)
    return out


def span_rows(rows: np.ndarray, q: int) -> np.ndarray:
    """Every F_q combination of ``rows`` in lexicographic coefficient order."""
    n = rows.shape[1]
    work = np.uint16 if q <= 256 else np.int64
    words = np.zeros((1, n), dtype=work)
    for j in range(rows.shape[0] - 1, -1, -1):
        g = rows[j].astype(work)
        words = np.concatenate([(work(a) * g + words) % work(q) for a in range(q)])
    return words.astype(symbol_dtype(q))


def codeword_matrix(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """``(N, n)`` array of all codewords; row ``i`` encodes message index ``i``."""
    check_budget("codewords", code.N, budget)
    return span_rows(code.G, code.q)


def enumerate_codewords(
    code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator[Codeword]:
    C = codeword_matrix(code, budget)
    M = all_messages(code.q, code.k, budget)
    for c, x in zip(C, M):
        yield Codeword(tuple(int(s) for s in c), tuple(int(s) for s in x))


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> tuple[int, Fraction]:
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"words have lengths {x.shape} and {y.shape}")
    if x.size == 0:
        raise LengthMismatch("words must be nonempty")
    count = int(np.count_nonzero(x != y))
    return count, Fraction(count, x.size)


def one_hot(words: np.ndarray, q: int) -> np.ndarray:
    """``(m, n*q)`` float indicator matrix; row ``i`` flags symbol ``words[i, j]`` at slot ``j*q + s``."""
    words = np.asarray(words, dtype=np.int64)
    m, n = words.shape
    out = np.zeros((m, n * q), dtype=np.float32)
    out[np.arange(m)[:, None], np.arange(n)[None, :] * q + words] = 1.0
    return out


def agreement_matrix(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """Number of agreeing coordinates between every row of ``A`` and every row of ``B``.

    Computed as a product of one-hot matrices; exact while ``n < 2**24``.
    """
    if A.shape[1] != B.shape[1]:
        raise LengthMismatch("word sets have different lengths")
    return np.rint(one_hot(A, q) @ one_hot(B, q).T).astype(np.int64)


def distance_matrix(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    return A.shape[1] - agreement_matrix(A, B, q)


def codeword_weights(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    return np.count_nonzero(codeword_matrix(code, budget), axis=1)


def weight_profile(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> WeightProfile:
    counts = np.bincount(codeword_weights(code, budget), minlength=code.n + 1)
    return WeightProfile({w: int(c) for w, c in enumerate(counts) if c})


def min_distance(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Smallest weight of a nonzero codeword; 0 if every codeword is zero."""
    w = codeword_weights(code, budget)
    nz = w[w > 0]
    return int(nz.min()) if nz.size else 0


def low_weight_count(code: LinearCode, w: int, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Number of codewords (zero word included) of weight at most ``w``."""
    return int(np.count_nonzero(codeword_weights(code, budget) <= w))


def random_generator(q: int, k: int, n: int, seed: int) -> LinearCode:
    """Generator with i.i.d. uniform entries; the seed fixes it on every platform."""
    check_prime(q)
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    check_budget("generator entries", k * n, DEFAULT_MATRIX_BUDGET)
    rng = make_rng(seed)
    return LinearCode(q, rng.integers(0, q, size=(k, n), dtype=np.int64))


def random_generators(q: int, k: int, n: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent uniform generators drawn from an existing stream."""
    return rng.integers(0, q, size=(count, k, n), dtype=np.int64)


def rm_monomials(r: int, m: int) -> list[tuple[int, ...]]:
    """Variable sets of all monomials of degree <= r, by degree then lexicographically."""
    return [s for d in range(r + 1) for s in itertools.combinations(range(m), d)]


def reed_muller(r: int, m: int, budget: int = DEFAULT_MATRIX_BUDGET) -> LinearCode:
    """Binary RM(r, m).

    Point ``p`` (column ``p``) assigns bit ``i`` of ``p`` to variable ``x_i``.
    """
    if not 0 <= r <= m <= 20:
        raise ValueError(f"need 0 <= r <= m <= 20, got r={r}, m={m}")
    k = sum(math.comb(m, i) for i in range(r + 1))
    n = 1 << m
    check_budget("RM generator entries", k * n, budget)
    points = np.arange(n, dtype=np.int64)
    bits = (points[None, :] >> np.arange(m)[:, None]) & 1
    G = np.ones((k, n), dtype=np.int64)
    for row, mono in enumerate(rm_monomials(r, m)):
        for v in mono:
            G[row] &= bits[v]
    return LinearCode(2, G)


def draw_puncture_multiset(n_in: int, n_out: int, seed: int) -> np.ndarray:
    """``n_out`` coordinates of ``[n_in]`` drawn i.i.d. uniformly with replacement."""
    if n_out < 1:
        raise ValueError("punctured length must be positive")
    return make_rng(seed).integers(0, n_in, size=n_out, dtype=np.int64)


def restrict(code: LinearCode, T: Sequence[int]) -> LinearCode:
    """Code whose coordinate ``j`` is coordinate ``T[j]`` of ``code``."""
    T = np.asarray(T, dtype=np.int64)
    if T.ndim != 1 or T.size == 0:
        raise ValueError("coordinate multiset must be a nonempty 1-D sequence")
    return LinearCode(code.q, code.G[:, T])


def puncture(code: LinearCode, n_out: int, seed: int, retain: bool = False) -> LinearCode:
    """Randomly puncture ``code``.

    By default the coordinates are ``n_out`` i.i.d. uniform draws with
    replacement, kept in draw order.  With ``retain=True`` each coordinate is
    kept independently with probability ``n_out / n``, so the output length is
    only ``n_out`` in expectation.
    """
    if retain:
        if n_out < 1:
            raise ValueError("punctured length must be positive")
        p = min(1.0, n_out / code.n)
        keep = np.flatnonzero(make_rng(seed).random(code.n) < p)
        if keep.size == 0:
            raise ValueError("retain-puncturing kept no coordinates; try another seed")
        return restrict(code, keep)
    return restrict(code, draw_puncture_multiset(code.n, n_out, seed))


def wozencraft_from_multipliers(
    k: int, multipliers: Sequence[int], modulus: int = 0
) -> LinearCode:
    """Binary code mapping x in GF(2^k) to the bits of ``(x, a_1 x, ..., a_r x)``.

    Message bit ``j`` is the coefficient of ``X^j`` in x; each block is expanded
    little-endian.
    """
    fld = BinaryExtField(k, modulus)
    scales = [1, *(int(a) for a in multipliers)]
    for a in scales:
        if not 0 <= a < fld.order:
            raise ValueError(f"multiplier {a} is not an element of GF(2^{k})")
    rows = []
    for j in range(k):
        x = 1 << j
        bits: list[int] = []
        for a in scales:
            bits.extend(fld.to_bits(fld.mul(a, x)))
        rows.append(bits)
    return LinearCode(2, rows)


def wozencraft_multipliers(k: int, r: int, seed: int) -> np.ndarray:
    return make_rng(seed).integers(0, 1 << k, size=r, dtype=np.int64)


def wozencraft(k: int, r: int, seed: int, modulus: int = 0) -> LinearCode:
    if r < 0:
        raise ValueError("multiplier count must be nonnegative")
    return wozencraft_from_multipliers(k, wozencraft_multipliers(k, r, seed), modulus)


def full_rank_probability(q: int, k: int, n: int) -> Fraction:
    """Probability that a uniform ``k x n`` matrix over F_q has rank k.

    Equals the product of ``1 - q^(r-n)`` over ``r < k``; zero when ``k > n``.
    """
    check_prime(q)
    if k > n:
        return Fraction(0)
    p = Fraction(1)
    for r in range(k):
        p *= 1 - Fraction(1, q ** (n - r))
    return p


def rref_mod_q(M: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q and the pivot columns (lowest index first)."""
    A = [[int(v) % q for v in row] for row in np.asarray(M)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = pow(A[r][c], q - 2, q)
        A[r] = [(v * inv) % q for v in A[r]]
        for i in range(rows):
            f = A[i][c]
            if i != r and f:
                A[i] = [(a - f * b) % q for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return np.array(A, dtype=np.int64).reshape(rows, cols), pivots


def rank_mod_q(M: np.ndarray, q: int) -> int:
    return len(rref_mod_q(M, q)[1])


def format_gen(code: LinearCode) -> str:
    lines = [f"{code.q} {code.k} {code.n}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in code.G)
    return "\n".join(lines) + "\n"


def parse_gen(text: str) -> LinearCode:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty generator file")
    try:
        q, k, n = (int(t) for t in lines[0].split())
        rows = [[int(t) for t in line.split()] for line in lines[1 : 1 + k]]
    except ValueError as exc:
        raise ValueError(f"malformed generator file: {exc}") from None
    if len(rows) != k or any(len(row) != n for row in rows):
        raise ValueError(f"generator file body does not match header {q} {k} {n}")
    if any(line.strip() for line in lines[1 + k :]):
        raise ValueError("trailing content after generator rows")
    return LinearCode(q, rows)


def save_gen(code: LinearCode, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_gen(code))


def load_gen(path: str | PathLike) -> LinearCode:
    with open(path, encoding="utf-8") as fh:
        return parse_gen(fh.read())

