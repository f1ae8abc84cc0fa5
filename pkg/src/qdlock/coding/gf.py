"""Table-driven arithmetic in GF(2^m)."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..core import ContractError

# Binary primitive polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    2: 0b111,          # x^2 + x + 1
    3: 0b1011,         # x^3 + x + 1
    4: 0b10011,        # x^4 + x + 1
    5: 0b100101,       # x^5 + x^2 + 1
    6: 0b1000011,      # x^6 + x + 1
    7: 0b10001001,     # x^7 + x^3 + 1
    8: 0b100011101,    # x^8 + x^4 + x^3 + x^2 + 1
}


@dataclass(frozen=True)
class GaloisField:
    m: int
    poly: int
    exp: np.ndarray = field(repr=False, compare=False)
    log: np.ndarray = field(repr=False, compare=False)
    mul_table: np.ndarray = field(repr=False, compare=False)
    inv_table: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return 1 << self.m

    @property
    def q1(self) -> int:
        """Size of the multiplicative group."""
        return self.order - 1

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return int(self.exp[self.q1 - self.log[a]])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def alpha_pow(self, i: int) -> int:
        return int(self.exp[i % self.q1])


@lru_cache(maxsize=None)
def gf(m: int, poly: int | None = None) -> GaloisField:
    if poly is None:
        if m not in PRIMITIVE_POLYS:
            raise ContractError(f"no default primitive polynomial for m={m}")
        poly = PRIMITIVE_POLYS[m]
    q1 = (1 << m) - 1
    exp = np.zeros(2 * q1, dtype=np.int64)
    log = np.zeros(1 << m, dtype=np.int64)
    x = 1
    for i in range(q1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x >> m:
            x ^= poly
    if len(set(exp[:q1].tolist())) != q1:
        raise ContractError(f"polynomial {poly:#b} is not primitive for m={m}")
    exp[q1:] = exp[:q1]
    la = log[1:]
    mul = np.zeros((1 << m, 1 << m), dtype=np.int64)
    mul[1:, 1:] = exp[la[:, None] + la[None, :]]
    inv = np.zeros(1 << m, dtype=np.int64)
    inv[1:] = exp[q1 - la]
    for arr in (exp, log, mul, inv):
        arr.setflags(write=False)
    return GaloisField(m, poly, exp, log, mul, inv)
