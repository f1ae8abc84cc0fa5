"""
Shared domain types, bit-string utilities and deterministic randomness.

Conventions used throughout the package:

* bit arrays are ``uint8`` numpy arrays holding 0/1, index 0 is the first
  transmitted bit;
* byte serialisation is most-significant-bit first;
* received words and channel outcomes are ``int8`` arrays where ``ERASED``
  (-1) marks a lost photon / unknown position.
"""

from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

ERASED = -1
LOST = ERASED


class ContractError(ValueError):
    """Raised when a caller violates an operation's precondition."""


class DecodeFailure(Exception):
    """An uncorrectable block. The caller decides how to treat it."""


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ContractError("bit values must be 0 or 1")
    return arr.astype(np.uint8, copy=True)


class BitString:
    """Immutable ordered sequence of bits backed by a read-only uint8 array."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[Iterable[int], np.ndarray, "BitString"] = ()):
        if isinstance(bits, BitString):
            arr = bits._bits
        else:
            if not isinstance(bits, (np.ndarray, list, tuple)):
                bits = list(bits)
            arr = _as_bits(bits)
            arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        text = text.strip()
        if any(c not in "01" for c in text):
            raise ContractError(f"not a bit string: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(np.zeros(length, dtype=np.uint8))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        """MSB-first binary expansion of ``value`` on ``length`` bits."""
        if value < 0 or value >> length:
            raise ContractError(f"{value} does not fit in {length} bits")
        return cls([(value >> (length - 1 - i)) & 1 for i in range(length)])

    @classmethod
    def from_bytes(cls, data: bytes, length: int | None = None) -> "BitString":
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if length is not None:
            if length > bits.size:
                raise ContractError("length exceeds available bits")
            bits = bits[:length]
        return cls(bits)

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitString(self._bits[index])
        index = int(index)
        if not 0 <= index < self.length:
            raise IndexError(f"bit index {index} out of range [0, {self.length})")
        return int(self._bits[index])

    def __iter__(self):
        return (int(b) for b in self._bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self.length, self._bits.tobytes()))

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode()

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 64:
            s = s[:61] + "..."
        return f"BitString('{s}', length={self.length})"

    def to_int(self) -> int:
        value = 0
        for b in self._bits:
            value = (value << 1) | int(b)
        return value

    def to_bytes(self) -> bytes:
        """Packed MSB-first bytes; the last byte is zero-padded."""
        return np.packbits(self._bits).tobytes()

    def to_file_bytes(self) -> bytes:
        """8-byte little-endian bit count followed by the packed bits."""
        return struct.pack("<Q", self.length) + self.to_bytes()

    @classmethod
    def from_file_bytes(cls, data: bytes, offset: int = 0) -> tuple["BitString", int]:
        """Parse the file form at ``offset``; return the string and the next offset."""
        if len(data) - offset < 8:
            raise ContractError("truncated bit-string header")
        (length,) = struct.unpack_from("<Q", data, offset)
        nbytes = (length + 7) // 8
        start = offset + 8
        if len(data) - start < nbytes:
            raise ContractError("truncated bit-string payload")
        return cls.from_bytes(data[start:start + nbytes], length), start + nbytes

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_file_bytes()).digest()


def xor(a: BitString, b: BitString) -> BitString:
    if a.length != b.length:
        raise ContractError(f"xor length mismatch: {a.length} != {b.length}")
    return BitString(a.bits ^ b.bits)


class Basis(enum.IntEnum):
    """Preparation/measurement basis. Z and Y are mutually unbiased."""

    Z = 0
    Y = 1


@dataclass(frozen=True)
class QubitSymbol:
    basis: Basis
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ContractError("QubitSymbol.bit must be 0 or 1")
        object.__setattr__(self, "basis", Basis(self.basis))


@dataclass(frozen=True)
class QubitBlock:
    """A sequence of prepared qubits stored column-wise.

    ``bases[i]`` is 0 for Z and 1 for Y, ``bits[i]`` is the eigenvalue index.
    """

    bases: np.ndarray
    bits: np.ndarray

    def __post_init__(self):
        bases = _as_bits(self.bases)
        bits = _as_bits(self.bits)
        if bases.shape != bits.shape:
            raise ContractError("bases and bits must have equal length")
        bases.setflags(write=False)
        bits.setflags(write=False)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_symbols(cls, symbols: Sequence[QubitSymbol]) -> "QubitBlock":
        return cls(np.array([int(s.basis) for s in symbols], dtype=np.uint8),
                   np.array([s.bit for s in symbols], dtype=np.uint8))

    def __len__(self) -> int:
        return int(self.bits.size)

    def __getitem__(self, i: int) -> QubitSymbol:
        return QubitSymbol(Basis(int(self.bases[i])), int(self.bits[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def to_symbols(self) -> list[QubitSymbol]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QubitBlock):
            return NotImplemented
        return np.array_equal(self.bases, other.bases) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True)
class ChannelParams:
    eta: float
    e_b: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ContractError(f"eta must lie in [0, 1], got {self.eta}")
        if not 0.0 <= self.e_b <= 0.5:
            raise ContractError(f"e_b must lie in [0, 0.5], got {self.e_b}")


SEED_BITS = 256


@dataclass
class RngStream:
    """Splittable deterministic generator.

    The stream is a Philox counter-based generator keyed by a numpy
    ``SeedSequence`` built from ``seed`` and the spawn path
    ``(stream_id, *sub)``. Identical (seed, path) always produces the same
    sequence; successive draws on one instance advance it.
    """

    seed: int
    stream_id: int = 0
    sub: tuple = ()
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.seed < (1 << SEED_BITS):
            raise ContractError("seed must be a non-negative 256-bit integer")
        if self.stream_id < 0 or any(s < 0 for s in self.sub):
            raise ContractError("stream ids must be non-negative")

    @classmethod
    def from_bits(cls, bits: BitString, stream_id: int = 0) -> "RngStream":
        """Stream keyed by an arbitrary-length bit string (hashed to 256 bits)."""
        seed = int.from_bytes(hashlib.sha256(bits.to_file_bytes()).digest(), "big")
        return cls(seed, stream_id)

    def substream(self, *index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.sub + tuple(int(i) for i in index))

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.sub))
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen


def draw_bits(rng: RngStream, k: int) -> BitString:
    if k < 0:
        raise ContractError("cannot draw a negative number of bits")
    return BitString(rng.generator.integers(0, 2, size=k, dtype=np.uint8))
