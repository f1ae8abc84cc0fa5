"""Key-seeded permutation of the codeword bits and its inverse."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .coding import _kernels
from .core import BitString, ContractError, RngStream

PERMUTATION_KEY_FACTOR = 40000
PERMUTATION_STREAM = 0


def _exact_ceil(x: mpmath.mpf) -> int:
    c = int(mpmath.ceil(x))
    # guard against x landing within working precision of an integer
    if abs(x - c) < mpmath.mpf(10) ** (-(mpmath.mp.dps - 10)):
        raise ArithmeticError("ceiling undecidable at working precision")
    return c


def permutation_key_length(n: int, epsilon: float) -> int:
    """ceil(40000 * log2(24 n^2 / epsilon)) bits, with epsilon taken as its exact binary value."""
    if n < 1 or not 0.0 < epsilon < 1.0:
        raise ContractError("need n >= 1 and 0 < epsilon < 1")
    with mpmath.workdps(60):
        x = PERMUTATION_KEY_FACTOR * mpmath.log(24 * mpmath.mpf(n) ** 2 / mpmath.mpf(epsilon), 2)
        return _exact_ceil(x)


@dataclass(frozen=True)
class PermutationSeed:
    """Generator key for the permutation plus the key length charged for it.

    ``bits`` is what actually keys the generator; ``accounted_length`` is what
    the key ledger charges, independent of ``len(bits)``.
    """

    bits: BitString
    accounted_length: int

    @classmethod
    def for_session(cls, bits: BitString, n: int, epsilon: float) -> "PermutationSeed":
        return cls(bits, permutation_key_length(n, epsilon))


@dataclass(frozen=True, eq=False)
class Permutation:
    """mapping[i] is the destination index of source position i."""

    mapping: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ContractError("mapping is not a bijection on [0, n)")
        m.setflags(write=False)
        object.__setattr__(self, "mapping", m)

    @property
    def size(self) -> int:
        return int(self.mapping.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.mapping, other.mapping)

    def __hash__(self) -> int:
        return hash(self.mapping.tobytes())

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))


def derive_permutation(seed: PermutationSeed | BitString, n: int, stream: int = 0) -> Permutation:
    """Fisher-Yates shuffle of [0, n) driven by a generator keyed on the seed bits.

    ``stream`` selects an independent permutation for each message block.
    """
    if n < 1:
        raise ContractError("permutation size must be >= 1")
    bits = seed.bits if isinstance(seed, PermutationSeed) else seed
    if bits.length == 0:
        raise ContractError("permutation seed is empty")
    gen = RngStream.from_bits(bits, stream_id=PERMUTATION_STREAM).substream(stream).generator
    # draws[i] uniform on [0, i]
    draws = np.zeros(n, dtype=np.int64)
    if n > 1:
        draws[1:] = gen.integers(0, np.arange(2, n + 1), dtype=np.int64)
    return Permutation(_kernels.fisher_yates(draws))


def apply_permutation(p: Permutation, xs: Sequence | np.ndarray):
    """out[mapping[i]] = xs[i]. Works along the last axis of arrays."""
    arr = np.asarray(xs)
    if arr.shape[-1:] != (p.size,):
        raise ContractError(f"sequence length must be {p.size}")
    out = np.empty_like(arr)
    out[..., p.mapping] = arr
    if isinstance(xs, (list, tuple)):
        return type(xs)(out.tolist())
    return out


def invert_permutation(p: Permutation) -> Permutation:
    inv = np.empty(p.size, dtype=np.int64)
    inv[p.mapping] = np.arange(p.size)
    return Permutation(inv)

