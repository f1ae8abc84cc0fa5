"""Walsh-Hadamard inner code with maximum-likelihood decoding."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..core import ERASED, BitString, ContractError
from . import _kernels


@dataclass(frozen=True)
class HadamardCode:
    """[2^k, k, 2^(k-1)] code; bit j of the codeword for message u is
    parity(popcount(u & j)). Messages are read MSB-first, so message index i
    pairs with bit (k-1-i) of both u and j."""

    k: int

    def __post_init__(self):
        if not 1 <= self.k <= 16:
            raise ContractError("Hadamard code needs 1 <= k <= 16")

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def d(self) -> int:
        return 1 << (self.k - 1)

    @cached_property
    def table(self) -> np.ndarray:
        """All codewords, row u = codeword of message value u."""
        return ((1 - _kernels.sylvester(self.k)) // 2).astype(np.uint8)

    def encode_values(self, values: np.ndarray) -> np.ndarray:
        """Encode integer message values; returns shape (len(values), 2^k)."""
        return self.table[np.asarray(values, dtype=np.int64)]

    def decode_batch(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """ML-decode rows of a {0, 1, ERASED} matrix.

        Returns (message values, confidence). Confidence is agreements minus
        disagreements over non-erased positions; ties go to the smallest value.
        """
        words = np.asarray(words)
        if words.size and (words.min() < ERASED or words.max() > 1):
            raise ContractError("received words must hold 0, 1 or ERASED (-1)")
        soft = np.where(words == ERASED, 0, 1 - 2 * words.astype(np.int32))
        scores = _kernels.fwht(soft)
        best = np.argmax(scores, axis=1)
        return best, scores[np.arange(scores.shape[0]), best]


def _msg_value(msg: BitString) -> int:
    return msg.to_int()


def hadamard_encode(code: HadamardCode, msg: BitString) -> BitString:
    if msg.length != code.k:
        raise ContractError(f"message length {msg.length} != k={code.k}")
    return BitString(code.table[_msg_value(msg)])


def hadamard_decode(code: HadamardCode, word) -> tuple[BitString, int]:
    word = np.asarray(word)
    if word.shape != (code.n,):
        raise ContractError(f"word length must be {code.n}")
    value, conf = code.decode_batch(word[None, :])
    return BitString.from_int(int(value[0]), code.k), int(conf[0])
