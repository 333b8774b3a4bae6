"""Simplex encoding of q-ary words as unit-modulus complex vectors.

Symbol ``s`` maps to ``(w^(s*1), ..., w^(s*(q-1)))`` with ``w = exp(2 pi i / q)``;
a word maps to the concatenation of its symbol blocks.  The Hermitian inner
product of two encoded words depends only on their Hamming distance::

    <phi(x), phi(y)> = (q - 1) n - q * dist(x, y)

so all inner products here are computed exactly from agreement counts, and the
complex path is kept only as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from listdecode.code import (
    DEFAULT_ENUM_BUDGET,
    LinearCode,
    check_budget,
    codeword_matrix,
    distance_matrix,
)
from listdecode.errors import IndexOutOfRange, LengthMismatch, SymbolOutOfRange
from listdecode.field import check_prime


@lru_cache(maxsize=None)
def phase_table(q: int) -> np.ndarray:
    """``(q, q-1)`` table whose row ``s`` is the simplex encoding of symbol ``s``."""
    s = np.arange(q)[:, None]
    alpha = np.arange(1, q)[None, :]
    table = np.exp(2j * np.pi * ((s * alpha) % q) / q)
    table.setflags(write=False)
    return table


def _as_word(q: int, x: Sequence[int]) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1:
        raise LengthMismatch("a word must be one-dimensional")
    if x.size and (x.min() < 0 or x.max() >= q):
        raise SymbolOutOfRange(f"symbols must lie in 0..{q - 1}")
    return x


def encode_word(q: int, x: Sequence[int]) -> np.ndarray:
    check_prime(q)
    return phase_table(q)[_as_word(q, x)].reshape(-1)


def encode_words(q: int, words: np.ndarray) -> np.ndarray:
    """Encode each row of ``words``; returns ``(m, n*(q-1))``."""
    words = np.asarray(words, dtype=np.int64)
    return phase_table(q)[words].reshape(words.shape[0], -1)


def simplex_inner_product(
    q: int,
    x: Sequence[int],
    y: Sequence[int],
    mode: Literal["exact", "complex"] = "exact",
) -> int | float:
    """Hermitian inner product ``sum(phi(x) * conj(phi(y)))``.

    ``exact`` returns the integer ``(q-1)n - q*dist``; ``complex`` sums the
    encoded vectors directly and returns the real part as a float.
    """
    check_prime(q)
    x = _as_word(q, x)
    y = _as_word(q, y)
    if x.shape != y.shape:
        raise LengthMismatch(f"words have lengths {x.size} and {y.size}")
    if mode == "exact":
        d = int(np.count_nonzero(x != y))
        return (q - 1) * x.size - q * d
    if mode == "complex":
        return float(np.vdot(encode_word(q, y), encode_word(q, x)).real)
    raise ValueError(f"unknown mode {mode!r}")


def gram_exact(q: int, words: np.ndarray) -> np.ndarray:
    """Integer Gram matrix of the encoded rows of ``words``."""
    n = words.shape[1]
    return (q - 1) * n - q * distance_matrix(words, words, q)


@dataclass(frozen=True)
class SparsePattern:
    """A binary vector with ones exactly on ``support`` (column indices)."""

    support: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(i) for i in self.support)
        if any(a >= b for a, b in zip(s, s[1:])):
            raise ValueError(f"support must be strictly increasing, got {s}")
        if s and s[0] < 0:
            raise IndexOutOfRange("support indices must be nonnegative")
        object.__setattr__(self, "support", s)

    @property
    def L(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class PhiImage:
    vector: np.ndarray

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.vector).sum())

    @property
    def l2_norm_sq(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)


class SimplexMatrix:
    """The ``n(q-1) x N`` matrix whose column ``i`` encodes codeword ``i``.

    Columns are regenerated from the generator on demand; nothing ``N``-sized
    is stored.
    """

    def __init__(self, code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET):
        self.code = code
        self.budget = budget

    @property
    def shape(self) -> tuple[int, int]:
        return self.code.n * (self.code.q - 1), self.code.N

    def _check(self, index: int) -> None:
        if not 0 <= index < self.code.N:
            raise IndexOutOfRange(f"column {index} outside 0..{self.code.N - 1}")

    def column(self, index: int) -> np.ndarray:
        self._check(index)
        return encode_word(self.code.q, self.code.codeword(index))

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        """Dense ``(n(q-1), len(indices))`` block of the requested columns."""
        for i in indices:
            self._check(int(i))
        words = np.stack([self.code.codeword(int(i)) for i in indices])
        return encode_words(self.code.q, words).T

    def dense(self) -> np.ndarray:
        check_budget("dense simplex matrix", self.code.N, self.budget)
        return encode_words(self.code.q, codeword_matrix(self.code, self.budget)).T


def phi_apply(matrix: SimplexMatrix, pattern: SparsePattern) -> PhiImage:
    check_budget("pattern columns", pattern.L, matrix.budget)
    if not pattern.support:
        return PhiImage(np.zeros(matrix.shape[0], dtype=complex))
    return PhiImage(matrix.columns(pattern.support).sum(axis=1))


def l1_norms(q: int, words: np.ndarray, patterns: np.ndarray) -> np.ndarray:
    """``||Phi x||_1`` for a batch of supports.

    ``words`` holds the codewords (one per row, indexed like the columns) and
    ``patterns`` is ``(B, L)`` of row indices.
    """
    patterns = np.asarray(patterns, dtype=np.int64)
    if q == 2:
        # Each coordinate contributes |L - 2 * (#ones)|.
        ones = words[patterns].sum(axis=1, dtype=np.int64)
        return np.abs(patterns.shape[1] - 2 * ones).sum(axis=1).astype(float)
    table = phase_table(q)
    acc = table[words[patterns[:, 0]].astype(np.int64)].copy()
    for j in range(1, patterns.shape[1]):
        acc += table[words[patterns[:, j]].astype(np.int64)]
    return np.abs(acc).sum(axis=(1, 2))


def l1_tolerance(code: LinearCode) -> float:
    return 1e-6 * code.n * (code.q - 1)

