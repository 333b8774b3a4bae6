"""Exact arithmetic in prime fields F_q and binary extension fields GF(2^k).

Code alphabets are always prime fields with the natural identification of
residue ``i`` with the symbol ``i``.  The binary extension fields exist only to
supply the multipliers of the Wozencraft ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from listdecode.errors import InverseOfZero, NonPrimeModulus, ReducibleModulus


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


def check_prime(q: int) -> int:
    if not isinstance(q, int) or not is_prime(q):
        raise NonPrimeModulus(f"alphabet order must be prime, got {q!r}")
    return q


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_q with elements ``0..q-1``."""

    q: int

    def __post_init__(self):
        check_prime(self.q)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.q)
        return pow(a % self.q, e, self.q)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise InverseOfZero(f"0 has no inverse in F_{self.q}")
        return pow(a, self.q - 2, self.q)

    def elements(self) -> range:
        return range(self.q)


_PRIME_OPS = ("add", "sub", "mul", "inv", "pow")


def prime_field_op(q: int, op: str, a: int, b: int | None = None) -> int:
    """Apply ``op`` in F_q.  ``b`` is the exponent for ``pow`` and ignored by ``inv``."""
    f = PrimeField(q)
    if op not in _PRIME_OPS:
        raise ValueError(f"unknown field operation {op!r}")
    for name, v in (("a", a), ("b", b)):
        if v is not None and op != "pow" and not 0 <= v < q:
            raise ValueError(f"operand {name}={v} outside 0..{q - 1}")
    if op == "inv":
        return f.inv(a)
    if b is None:
        raise ValueError(f"operation {op!r} needs a second operand")
    return getattr(f, op)(a, b)


# One irreducible polynomial per degree, bit j = coefficient of x^j.
DEFAULT_MODULI: dict[int, int] = {
    1: 0b11,  # x + 1
    2: 0x7,  # x^2 + x + 1
    3: 0xB,  # x^3 + x + 1
    4: 0x13,  # x^4 + x + 1
    5: 0x25,  # x^5 + x^2 + 1
    6: 0x43,  # x^6 + x + 1
    7: 0x83,  # x^7 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    9: 0x211,  # x^9 + x^4 + 1
    10: 0x409,  # x^10 + x^3 + 1
    11: 0x805,  # x^11 + x^2 + 1
    12: 0x1053,  # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,  # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,  # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,  # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials given as bitmasks."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def is_irreducible(modulus: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..deg/2."""
    deg = modulus.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if poly_mod(modulus, f) == 0:
                return False
    return True


@dataclass(frozen=True)
class BinaryExtField:
    """GF(2^k) as F_2[x] modulo an irreducible polynomial; elements are k-bit masks."""

    k: int
    modulus: int = field(default=0)

    def __post_init__(self):
        if not 1 <= self.k <= 16:
            raise ValueError(f"extension degree must be in 1..16, got {self.k}")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", DEFAULT_MODULI[self.k])
        if self.modulus.bit_length() - 1 != self.k:
            raise ReducibleModulus(
                f"modulus {self.modulus:#x} does not have degree {self.k}"
            )
        if not is_irreducible(self.modulus):
            raise ReducibleModulus(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.k

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise InverseOfZero("0 has no inverse")
        return self.pow(a, self.order - 2)

    def to_bits(self, a: int) -> list[int]:
        """Little-endian bit expansion: bit j is the coefficient of x^j."""
        return [(a >> j) & 1 for j in range(self.k)]


def ext_field_mul(fld: BinaryExtField, a: int, b: int) -> int:
    return fld.mul(a, b)
