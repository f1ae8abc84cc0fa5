"""Reed-Solomon outer code concatenated with a Walsh-Hadamard inner code."""

from dataclasses import dataclass

import numpy as np

from ..core import ERASED, BitString, ContractError, DecodeFailure
from .hadamard import HadamardCode
from .reed_solomon import ReedSolomonCode, rs_interpolate


def bits_to_symbols(bits: np.ndarray, m: int) -> np.ndarray:
    """Group the last axis into MSB-first m-bit integers."""
    bits = np.asarray(bits, dtype=np.int64)
    shape = bits.shape[:-1] + (bits.shape[-1] // m, m)
    weights = 1 << np.arange(m - 1, -1, -1)
    return (bits.reshape(shape) * weights).sum(axis=-1)


def symbols_to_bits(symbols: np.ndarray, m: int) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1)
    bits = (symbols[..., None] >> shifts) & 1
    return bits.reshape(symbols.shape[:-1] + (-1,)).astype(np.uint8)


@dataclass(frozen=True)
class ConcatenatedCode:
    outer: ReedSolomonCode
    inner: HadamardCode

    def __post_init__(self):
        if self.inner.k != self.outer.m:
            raise ContractError("inner.k must equal outer.m")

    @classmethod
    def from_params(cls, m: int, n_rs: int, k_rs: int) -> "ConcatenatedCode":
        return cls(ReedSolomonCode(m, n_rs, k_rs), HadamardCode(m))

    @property
    def message_bits(self) -> int:
        return self.outer.k_rs * self.outer.m

    @property
    def codeword_bits(self) -> int:
        return self.outer.n_rs * self.inner.n

    @property
    def rate(self) -> float:
        return self.message_bits / self.codeword_bits

    @property
    def min_distance(self) -> int:
        return self.outer.d_rs * self.inner.d

    def describe(self) -> str:
        return (f"RS[{self.outer.n_rs},{self.outer.k_rs}]/GF(2^{self.outer.m}) o "
                f"Hadamard[{self.inner.n},{self.inner.k}]")

    def encode_batch(self, msgs: np.ndarray) -> np.ndarray:
        msgs = np.asarray(msgs)
        if msgs.ndim != 2 or msgs.shape[1] != self.message_bits:
            raise ContractError(f"messages must have shape (B, {self.message_bits})")
        symbols = self.outer.encode_batch(bits_to_symbols(msgs, self.outer.m))
        blocks = self.inner.encode_values(symbols)            # (B, n_rs, 2^k)
        return blocks.reshape(msgs.shape[0], -1)

    def decode_batch(self, words: np.ndarray, force: bool = False):
        """Decode rows of a {0, 1, ERASED} matrix.

        Returns (message bits, ok). An inner block that is fully erased or
        has confidence <= 0 becomes an outer erasure. With ``force`` the rows
        the outer decoder rejects are filled by interpolating the inner
        ML decisions at the first k_rs positions instead of being zeroed.
        """
        words = np.asarray(words)
        if words.ndim != 2 or words.shape[1] != self.codeword_bits:
            raise ContractError(f"words must have shape (B, {self.codeword_bits})")
        nb = words.shape[0]
        inner_words = words.reshape(nb * self.outer.n_rs, self.inner.n)
        values, conf = self.inner.decode_batch(inner_words)
        outer_words = np.where(conf > 0, values, ERASED).reshape(nb, self.outer.n_rs)
        syms, ok = self.outer.decode_batch(outer_words)
        if force and not ok.all():
            guesses = values.reshape(nb, self.outer.n_rs)
            positions = np.arange(self.outer.n_rs)
            for b in np.flatnonzero(~ok):
                syms[b] = rs_interpolate(self.outer, positions, guesses[b])
        return symbols_to_bits(syms, self.outer.m), ok


def concat_encode(code: ConcatenatedCode, msg: BitString) -> BitString:
    if msg.length != code.message_bits:
        raise ContractError(f"message must have {code.message_bits} bits")
    return BitString(code.encode_batch(msg.bits[None, :])[0])


def concat_decode(code: ConcatenatedCode, word) -> BitString:
    word = np.asarray(word)
    if word.shape != (code.codeword_bits,):
        raise ContractError(f"word must have {code.codeword_bits} positions")
    bits, ok = code.decode_batch(word[None, :])
    if not ok[0]:
        raise DecodeFailure("concatenated block uncorrectable")
    return BitString(bits[0])


PRODUCTION_CODE = ConcatenatedCode.from_params(6, 63, 42)
