"""Sufficient conditions for list decodability, evaluated exactly on small codes.

Three certificates are computed here, each implying
``((1 - 1/q)(1 - eps), L - 1)``-list decodability:

* the l1 condition ``max_{|S| = L} ||Phi 1_S||_1 / L < (q-1) n eps``;
* a restricted isometry constant ``delta`` of the normalized simplex matrix at
  sparsity ``L``, which gives ``eps > (1 + delta) / sqrt(L)``;
* the average-distance condition, which turns the smallest average pairwise
  distance over ``L``-sets into ``eps^2 = 4 (1/L + eta (1 - 1/L))``.

All three are invariant under translating a column set by a codeword, so for
a linear code it suffices to enumerate sets that contain message 0.  This is
the default (``reduce=True``); it cuts the enumeration from ``C(N, L)`` to
``C(N-1, L-1)`` sets and still returns the lexicographically least optimal set.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator, Literal

import numpy as np

from listdecode.code import (
    DEFAULT_ENUM_BUDGET,
    LinearCode,
    all_messages,
    check_budget,
    codeword_matrix,
)
from listdecode.simplex import l1_norms, l1_tolerance

DEFAULT_SUBSET_BUDGET = 10**7
CHUNK = 1 << 15
TIE_TOL = 1e-9

Verdict = Literal["holds", "fails", "boundary", "inconclusive"]


def as_fraction(x: float | int | str | Fraction) -> Fraction:
    """Exact rational for a parameter; floats are read through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    return Fraction(int(x)) if isinstance(x, np.integer) else Fraction(x)


def floor_radius(q: int, n: int, epsilon: float | Fraction) -> int:
    """``floor((1 - 1/q)(1 - eps) n)`` in exact arithmetic, clamped at 0."""
    t = math.floor((1 - Fraction(1, q)) * (1 - as_fraction(epsilon)) * n)
    return max(t, 0)


def subset_count(N: int, L: int, reduce: bool = True) -> int:
    return math.comb(N - 1, L - 1) if reduce else math.comb(N, L)


def iter_supports(N: int, L: int, reduce: bool = True, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Size-L subsets of ``range(N)`` in lexicographic order, as ``(B, L)`` blocks."""
    if reduce:
        tails = itertools.combinations(range(1, N), L - 1)
        it = ((0, *t) for t in tails)
    else:
        it = itertools.combinations(range(N), L)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, chunk)), dtype=np.int64
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, L)


class _ArgBest:
    """Running maximum with lexicographically-least witness under a tie tolerance."""

    def __init__(self, sign: int = 1):
        self.sign = sign
        self.value = -math.inf
        self.witness: tuple[int, ...] | None = None

    def update(self, values: np.ndarray, supports: np.ndarray) -> None:
        v = self.sign * values
        i = int(np.argmax(v))
        best = float(v[i])
        if best > self.value + TIE_TOL:
            # first index within tolerance of the block maximum
            i = int(np.flatnonzero(v >= best - TIE_TOL)[0])
            self.value = float(v[i])
            self.witness = tuple(int(s) for s in supports[i])

    @property
    def result(self) -> float:
        return self.sign * self.value


def _verdict(value: float, threshold: float, tol: float, mode: str) -> Verdict:
    if abs(value - threshold) <= tol:
        return "boundary"
    if value > threshold:
        return "fails"
    return "holds" if mode == "exact" else "inconclusive"


@dataclass
class L1Certificate:
    q: int
    n: int
    L: int
    epsilon: float
    value: float
    threshold: float
    verdict: Verdict
    mode: Literal["exact", "greedy_lower_bound"]
    witness: tuple[int, ...]
    tolerance: float
    kind: str = field(default="l1", init=False)

    @property
    def radius(self) -> int:
        """Integer radius at which the certificate, if it holds, guarantees list size L-1."""
        return floor_radius(self.q, self.n, self.epsilon)

    def certified_radius(self) -> int | None:
        """Largest radius certified by ``value`` alone, for any eps above it.

        The l1 value certifies every ``t < (1 - 1/q)(n - value/(q-1))``.  None
        for greedy lower bounds, which certify nothing.
        """
        if self.mode != "exact":
            return None
        q, n = self.q, self.n
        if q == 2:
            v = Fraction(round(self.value * self.L), self.L)
            x = Fraction(1, 2) * (n - v)
            t = math.ceil(x) - 1
        else:
            x = (1 - 1 / q) * (n - self.value / (q - 1))
            t = math.ceil(x - 1e-7) - 1
        return t if t >= 0 else None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "L": self.L,
            "value": self.value,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "witness": list(self.witness),
            "mode": self.mode,
            "tolerance": self.tolerance,
        }


def max_l1(
    code: LinearCode,
    L: int,
    budget: int = DEFAULT_SUBSET_BUDGET,
    reduce: bool = True,
    words: np.ndarray | None = None,
) -> tuple[float, tuple[int, ...]]:
    """Exact ``max ||Phi x||_1`` over exactly-L-sparse binary x, with witness support."""
    if not 1 <= L <= code.N:
        raise ValueError(f"sparsity must be in 1..{code.N}, got {L}")
    check_budget("l1 supports", subset_count(code.N, L, reduce), budget)
    if words is None:
        words = codeword_matrix(code)
    best = _ArgBest()
    for block in iter_supports(code.N, L, reduce):
        best.update(l1_norms(code.q, words, block), block)
    return best.result, best.witness


def greedy_l1(code: LinearCode, L: int, words: np.ndarray | None = None) -> tuple[float, tuple[int, ...]]:
    """Lower bound on ``max ||Phi x||_1`` by greedy support growth.

    Each step adds the column giving the largest l1 norm, lowest index on ties.
    """
    if not 1 <= L <= code.N:
        raise ValueError(f"sparsity must be in 1..{code.N}, got {L}")
    if words is None:
        words = codeword_matrix(code)
    support: list[int] = []
    value = 0.0
    for _ in range(L):
        cand = np.setdiff1d(np.arange(code.N), support)
        blocks = np.column_stack([np.tile(support, (cand.size, 1)), cand]).astype(np.int64)
        vals = l1_norms(code.q, words, blocks)
        top = vals.max()
        i = int(np.flatnonzero(vals >= top - TIE_TOL)[0])
        support.append(int(cand[i]))
        value = float(vals[i])
    return value, tuple(sorted(support))


def l1_certificate(
    code: LinearCode,
    L: int,
    epsilon: float | Fraction,
    budget: int = DEFAULT_SUBSET_BUDGET,
    mode: Literal["exact", "greedy"] = "exact",
    reduce: bool = True,
) -> L1Certificate:
    if mode == "exact":
        raw, witness = max_l1(code, L, budget, reduce)
        mode_name = "exact"
    elif mode == "greedy":
        raw, witness = greedy_l1(code, L)
        mode_name = "greedy_lower_bound"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    value = raw / L
    threshold = float((code.q - 1) * code.n * as_fraction(epsilon))
    tol = l1_tolerance(code)
    return L1Certificate(
        q=code.q,
        n=code.n,
        L=L,
        epsilon=float(epsilon),
        value=value,
        threshold=threshold,
        verdict=_verdict(value, threshold, tol, mode_name),
        mode=mode_name,
        witness=witness,
        tolerance=tol,
    )


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-9, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a batch of real symmetric matrices by cyclic Jacobi rotations.

    ``A`` has shape ``(B, s, s)``.  Sweeps continue until the Frobenius norm of
    every off-diagonal part is below ``tol``.  Returns ``(B, s)``, ascending.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim == 2:
        return jacobi_eigenvalues(A[None], tol, max_sweeps)[0]
    s = A.shape[-1]
    off = ~np.eye(s, dtype=bool)
    for _ in range(max_sweeps):
        if np.sqrt((A[:, off] ** 2).sum(axis=1)).max(initial=0.0) < tol:
            break
        for p in range(s - 1):
            for r in range(p + 1, s):
                apq = A[:, p, r]
                active = np.abs(apq) > 1e-300
                if not active.any():
                    continue
                theta = np.where(active, (A[:, r, r] - A[:, p, p]) / (2 * np.where(active, apq, 1.0)), 0.0)
                big = np.abs(theta) > 1e150
                safe = np.where(big, 1.0, theta)
                # for huge theta, t ~ 1/(2 theta) and theta^2 would overflow
                t = np.where(
                    active,
                    np.where(
                        big,
                        0.5 / np.where(big, theta, 1.0),
                        np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1.0)),
                    ),
                    0.0,
                )
                t = np.where(active & (theta == 0), 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                # A <- J^T A J with J the (p, r) plane rotation
                Ap = A[:, :, p].copy()
                Ar = A[:, :, r].copy()
                A[:, :, p] = c[:, None] * Ap - sn[:, None] * Ar
                A[:, :, r] = sn[:, None] * Ap + c[:, None] * Ar
                Ap = A[:, p, :].copy()
                Ar = A[:, r, :].copy()
                A[:, p, :] = c[:, None] * Ap - sn[:, None] * Ar
                A[:, r, :] = sn[:, None] * Ap + c[:, None] * Ar
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diagonal(A, axis1=1, axis2=2), axis=1)


class _DifferenceIndex:
    """Maps a pair of message indices to the index of their difference message."""

    def __init__(self, q: int, k: int):
        self.q = q
        self.M = all_messages(q, k).astype(np.int64)
        self.place = q ** np.arange(k - 1, -1, -1, dtype=np.int64)

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return ((self.M[a] - self.M[b]) % self.q) @ self.place


def _pair_weights(code: LinearCode, weights: np.ndarray, diff: _DifferenceIndex, block: np.ndarray) -> np.ndarray:
    """``(B, L, L)`` Hamming distances between the codewords of each support."""
    B, L = block.shape
    D = np.zeros((B, L, L), dtype=np.int64)
    for i in range(L):
        for j in range(i + 1, L):
            d = weights[diff(block[:, i], block[:, j])]
            D[:, i, j] = d
            D[:, j, i] = d
    return D


@dataclass(frozen=True)
class RipDecodability:
    """Radius certified by a restricted isometry constant, with list size ``L - 1``."""

    radius: float | Fraction
    list_size: int
    boxed: bool

    def radius_count(self, n: int) -> int:
        """Largest integer disagreement count covered by the certified radius."""
        x = float(self.radius) * n
        t = math.floor(x + 1e-9)
        return max(t, 0)


@dataclass
class RipReport:
    q: int
    n: int
    s: int
    delta: float
    witness: tuple[int, ...]
    implied: RipDecodability | None
    boxed: RipDecodability | None

    @property
    def implied_radius(self) -> float | Fraction | None:
        return None if self.implied is None else self.implied.radius

    def to_json(self) -> dict:
        return {
            "kind": "rip",
            "L": self.s,
            "value": self.delta,
            "threshold": 0.5,
            "verdict": "holds" if self.delta <= 0.5 else "fails",
            "witness": list(self.witness),
            "mode": "exact",
            "tolerance": TIE_TOL,
            "implied_radius": None if self.implied is None else float(self.implied.radius),
        }


def rip_constant(
    code: LinearCode,
    s: int,
    budget: int = DEFAULT_SUBSET_BUDGET,
    reduce: bool = True,
) -> RipReport:
    """Restricted isometry constant of ``Phi / sqrt(n(q-1))`` at sparsity ``s``."""
    if not 1 <= s <= code.N:
        raise ValueError(f"sparsity must be in 1..{code.N}, got {s}")
    check_budget("RIP supports", subset_count(code.N, s, reduce), budget)
    q, n = code.q, code.n
    weights = np.count_nonzero(codeword_matrix(code), axis=1)
    diff = _DifferenceIndex(q, code.k)
    scale = n * (q - 1)
    best = _ArgBest()
    for block in iter_supports(code.N, s, reduce):
        gram = ((q - 1) * n - q * _pair_weights(code, weights, diff, block)) / scale
        eig = jacobi_eigenvalues(gram)
        dev = np.maximum(eig[:, -1] - 1.0, 1.0 - eig[:, 0])
        best.update(dev, block)
    delta = max(best.result, 0.0)
    implied = rip_implied_decodability(delta, s, q) if s >= 2 else None
    boxed = None
    if s >= 2 and delta <= 0.5 + TIE_TOL:
        boxed = rip_implied_decodability(Fraction(1, 2), s, q)
    return RipReport(q, n, s, delta, best.witness, implied, boxed)


def rip_implied_decodability(
    delta: float | Fraction, L: int, q: int
) -> RipDecodability | None:
    """Radius ``(1 - 1/q)(1 - (1 + delta)/sqrt(L))`` with list size ``L - 1``, if positive.

    Exact (a Fraction) when ``L`` is a perfect square.  ``boxed`` marks the
    ``delta <= 1/2`` case, reported at ``delta = 1/2``.
    """
    if L < 2 or delta < 0:
        raise ValueError("need L >= 2 and delta >= 0")
    boxed = delta <= Fraction(1, 2)
    root = math.isqrt(L)
    if root * root == L:
        d = as_fraction(delta)
        radius: float | Fraction = (1 - Fraction(1, q)) * (1 - (1 + d) / root)
    else:
        radius = (1 - 1 / q) * (1 - (1 + float(delta)) / math.sqrt(L))
    if radius <= 0:
        return None
    return RipDecodability(radius, L - 1, boxed)


@dataclass
class AvgDistanceCertificate:
    q: int
    n: int
    L: int
    min_avg_distance: Fraction
    eta: Fraction
    epsilon_sq: Fraction
    witness: tuple[int, ...]

    @property
    def epsilon(self) -> float:
        return math.sqrt(self.epsilon_sq)

    @property
    def vacuous(self) -> bool:
        return self.epsilon_sq > 1

    def to_json(self) -> dict:
        return {
            "kind": "avgdist",
            "L": self.L,
            "value": str(self.min_avg_distance),
            "threshold": str(1 - Fraction(1, self.q)),
            "verdict": "fails" if self.vacuous else "holds",
            "witness": list(self.witness),
            "mode": "exact",
            "tolerance": 0,
            "eta": str(self.eta),
            "epsilon": self.epsilon,
        }


def avg_distance_certificate(
    code: LinearCode,
    L: int,
    budget: int = DEFAULT_SUBSET_BUDGET,
    reduce: bool = True,
) -> AvgDistanceCertificate:
    """Smallest average pairwise relative distance over all ``L``-sets of messages."""
    if not 2 <= L <= code.N:
        raise ValueError(f"L must be in 2..{code.N}, got {L}")
    check_budget("avg-distance supports", subset_count(code.N, L, reduce), budget)
    weights = np.count_nonzero(codeword_matrix(code), axis=1)
    diff = _DifferenceIndex(code.q, code.k)
    best = _ArgBest(sign=-1)
    for block in iter_supports(code.N, L, reduce):
        total = _pair_weights(code, weights, diff, block).sum(axis=(1, 2)) // 2
        best.update(total.astype(float), block)
    pairs = math.comb(L, 2)
    min_avg = Fraction(round(best.result), pairs * code.n)
    eta = 1 - min_avg / (1 - Fraction(1, code.q))
    eta = min(max(eta, Fraction(0)), Fraction(1))
    eps_sq = 4 * (Fraction(1, L) + eta * (1 - Fraction(1, L)))
    return AvgDistanceCertificate(code.q, code.n, L, min_avg, eta, eps_sq, best.witness)


@dataclass(frozen=True)
class ParamPlan:
    epsilon: float
    q: int
    C0: float
    k: int
    L: int
    n: int
    radius: int
    margin: float

    @property
    def satisfied(self) -> bool:
        return self.margin > 0

    def to_json(self) -> dict:
        return asdict(self)


def plan_margin(n: int, L: int, k: int, q: int, C0: float, epsilon: float) -> float:
    """``n eps - (n / sqrt(L) + C0 sqrt(n ln N))`` with ``N = q^k``; positive means satisfied."""
    return n * epsilon - (n / math.sqrt(L) + C0 * math.sqrt(n * k * math.log(q)))


def plan_parameters(epsilon: float, q: int, C0: float, k: int) -> ParamPlan:
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if C0 <= 0:
        raise ValueError("C0 must be positive")
    eps = as_fraction(epsilon)
    L = math.ceil(4 / eps**2)
    n = max(math.ceil((2 * C0) ** 2 * k * math.log(q) / float(epsilon) ** 2), k)
    margin = plan_margin(n, L, k, q, C0, float(epsilon))
    # the formula can land exactly on the boundary; the inequality is strict
    while margin <= 0:
        n += 1
        margin = plan_margin(n, L, k, q, C0, float(epsilon))
    return ParamPlan(float(epsilon), q, C0, k, L, n, floor_radius(q, n, eps), margin)


def dimension_for_length(n: int, epsilon: float, q: int, C0: float) -> int:
    """Largest k with ``(2 C0)^2 k ln q / eps^2 <= n``, at least 1."""
    return max(1, math.floor(n * epsilon**2 / ((2 * C0) ** 2 * math.log(q))))
