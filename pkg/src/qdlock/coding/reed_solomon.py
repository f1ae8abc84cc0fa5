"""Evaluation-style Reed-Solomon codes over GF(2^m).

The message polynomial f has the k message symbols as coefficients (index j
is the coefficient of x^j) and the codeword is (f(1), f(a), ..., f(a^(n-1)))
for the primitive element a of the field.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .._jit import JIT_ENABLED
from ..core import ERASED, ContractError, DecodeFailure
from . import _kernels
from .gf import GaloisField, gf


@dataclass(frozen=True)
class ReedSolomonCode:
    m: int
    n_rs: int
    k_rs: int

    def __post_init__(self):
        if not 0 < self.k_rs < self.n_rs <= (1 << self.m) - 1:
            raise ContractError(
                f"RS[{self.n_rs},{self.k_rs}] over GF(2^{self.m}) needs k < n <= 2^m - 1")

    @property
    def d_rs(self) -> int:
        return self.n_rs - self.k_rs + 1

    @property
    def field(self) -> GaloisField:
        return gf(self.m)

    @cached_property
    def points(self) -> np.ndarray:
        return self.field.exp[: self.n_rs].copy()

    @property
    def full_length(self) -> bool:
        return self.n_rs == self.field.q1

    def _check_symbols(self, arr: np.ndarray) -> None:
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.order):
            raise ContractError(f"symbol out of GF(2^{self.m}) range")

    def encode_batch(self, msgs: np.ndarray) -> np.ndarray:
        msgs = np.asarray(msgs, dtype=np.int64)
        if msgs.ndim != 2 or msgs.shape[1] != self.k_rs:
            raise ContractError(f"messages must have shape (B, {self.k_rs})")
        self._check_symbols(msgs)
        F = self.field
        return _kernels.rs_encode_batch(msgs, self.n_rs, F.exp, F.log, F.q1)

    def _clean_codewords(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Rows with no erasures that already are codewords (full-length codes only)."""
        F = self.field
        n, k, q1 = self.n_rs, self.k_rs, F.q1
        i = np.arange(n)[None, :]
        l_ = np.arange(n)[:, None]
        e = (-(i * l_)) % q1                                   # (n_l, n_i)
        terms = F.exp[(F.log[words][:, None, :] + e[None, :, :]) % q1]
        terms = np.where(words[:, None, :] != 0, terms, 0)
        coeffs = np.bitwise_xor.reduce(terms, axis=2)          # (B, n)
        valid = ~np.any(coeffs[:, k:], axis=1)
        return valid, coeffs[:, :k]

    def decode_batch(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Errors-and-erasures decoding of each row; ERASED marks erasures.

        Returns (messages, ok). Rows with ok False are uncorrectable and their
        message row is zero.
        """
        words = np.asarray(words, dtype=np.int64)
        if words.ndim != 2 or words.shape[1] != self.n_rs:
            raise ContractError(f"words must have shape (B, {self.n_rs})")
        if words.size and words.max() >= self.field.order:
            raise ContractError(f"symbol out of GF(2^{self.m}) range")
        F = self.field
        if JIT_ENABLED or not self.full_length or words.shape[0] == 0:
            return _kernels.rs_decode_batch(words, self.points, self.k_rs, F.mul_table, F.inv_table)
        msgs = np.zeros((words.shape[0], self.k_rs), dtype=np.int64)
        ok = np.zeros(words.shape[0], dtype=bool)
        complete = ~np.any(words < 0, axis=1)
        if complete.any():
            valid, coeffs = self._clean_codewords(words[complete])
            rows = np.flatnonzero(complete)[valid]
            msgs[rows] = coeffs[valid]
            ok[rows] = True
        rest = np.flatnonzero(~ok)
        if rest.size:
            m2, ok2 = _kernels.rs_decode_batch(words[rest], self.points, self.k_rs, F.mul_table, F.inv_table)
            msgs[rest] = m2
            ok[rest] = ok2
        return msgs, ok


def rs_encode(code: ReedSolomonCode, msg: Sequence[int]) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape != (code.k_rs,):
        raise ContractError(f"message must have {code.k_rs} symbols")
    return code.encode_batch(msg[None, :])[0]


def rs_decode(code: ReedSolomonCode, word: Sequence) -> np.ndarray:
    """Decode one word; ``None`` or ERASED entries are erasures.

    Raises DecodeFailure when 2*errors + erasures exceeds n - k (or when the
    decoder cannot otherwise find a codeword within radius).
    """
    arr = np.array([ERASED if w is None else int(w) for w in word], dtype=np.int64)
    if arr.shape != (code.n_rs,):
        raise ContractError(f"word must have {code.n_rs} symbols")
    msgs, ok = code.decode_batch(arr[None, :])
    if not ok[0]:
        raise DecodeFailure(f"RS[{code.n_rs},{code.k_rs}] block uncorrectable")
    return msgs[0]


def rs_interpolate(code: ReedSolomonCode, positions: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Message whose codeword passes through ``values`` at the first k ``positions``.

    Used for forced (best-effort) decoding of blocks the decoder rejects.
    """
    F = code.field
    k = code.k_rs
    xs = code.points[np.asarray(positions[:k], dtype=np.int64)]
    ys = np.asarray(values[:k], dtype=np.int64)
    ok, f = _kernels.gao_decode(xs, ys, k, F.mul_table, F.inv_table)
    return f
