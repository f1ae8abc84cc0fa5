"""
Loss-tolerant locking: concatenated code on the qubit values, a keyed
permutation of the codeword bits, then key-derived Z/Y bases.

Messages longer than one code block are split into blocks; block b draws its
permutation and basis string from stream b of the session key. The key is
charged once per session for the total number of qubits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import mpmath
import numpy as np

from .coding import PRODUCTION_CODE, ConcatenatedCode
from .core import (
    LOST, BitString, ContractError, DecodeFailure, QubitBlock, RngStream, draw_bits,
)
from .extractor import (
    Permutation, PermutationSeed, apply_permutation, derive_permutation, invert_permutation,
    permutation_key_length,
)
from .extractor import _exact_ceil

BASIS_STREAM = 1
PERM_SEED_BITS = 256
KEY_MAGIC = b"QDLKEY01"


class KeyFileError(Exception):
    """Missing, truncated or inconsistent key file."""


@dataclass(frozen=True)
class SecurityParams:
    epsilon: float
    n_qubits: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ContractError("epsilon must lie in (0, 1)")
        if self.n_qubits < 1:
            raise ContractError("n_qubits must be >= 1")


def basis_key_length(epsilon: float) -> int:
    """ceil(log2(2 / epsilon^2))."""
    if not 0.0 < epsilon < 1.0:
        raise ContractError("epsilon must lie in (0, 1)")
    with mpmath.workdps(60):
        return _exact_ceil(mpmath.log(2 / mpmath.mpf(epsilon) ** 2, 2))


def fhs_key_length(n: int, epsilon: float) -> int:
    return basis_key_length(epsilon) + permutation_key_length(n, epsilon)


@dataclass(frozen=True)
class LockingKey:
    basis_seed: BitString
    perm_seed: PermutationSeed
    security: SecurityParams

    def __post_init__(self):
        if self.basis_seed.length != basis_key_length(self.security.epsilon):
            raise ContractError("basis seed length does not match epsilon")
        expected = permutation_key_length(self.security.n_qubits, self.security.epsilon)
        if self.perm_seed.accounted_length != expected:
            raise ContractError("permutation seed accounting does not match (n, epsilon)")

    @property
    def total_length(self) -> int:
        """Key bits charged for the session, r."""
        return self.basis_seed.length + self.perm_seed.accounted_length

    @classmethod
    def generate(cls, n_qubits: int, epsilon: float, rng: RngStream) -> "LockingKey":
        sec = SecurityParams(epsilon, n_qubits)
        basis = draw_bits(rng, basis_key_length(epsilon))
        perm = PermutationSeed.for_session(draw_bits(rng, PERM_SEED_BITS), n_qubits, epsilon)
        return cls(basis, perm, sec)

    def to_bytes(self) -> bytes:
        return (KEY_MAGIC
                + struct.pack("<dQ", self.security.epsilon, self.security.n_qubits)
                + self.basis_seed.to_file_bytes()
                + self.perm_seed.bits.to_file_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "LockingKey":
        if data[:8] != KEY_MAGIC:
            raise KeyFileError("bad magic, not a locking key file")
        try:
            epsilon, n_qubits = struct.unpack_from("<dQ", data, 8)
            basis, off = BitString.from_file_bytes(data, 24)
            perm_bits, off = BitString.from_file_bytes(data, off)
            if off != len(data):
                raise KeyFileError("trailing bytes after key payload")
            sec = SecurityParams(epsilon, n_qubits)
            return cls(basis, PermutationSeed.for_session(perm_bits, n_qubits, epsilon), sec)
        except (struct.error, ContractError) as exc:
            raise KeyFileError(f"corrupt key file: {exc}") from exc


def write_key(path, key: LockingKey) -> None:
    with open(path, "wb") as fh:
        fh.write(key.to_bytes())


def read_key(path) -> LockingKey:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError as exc:
        raise KeyFileError(f"key file not found: {path}") from exc
    return LockingKey.from_bytes(data)


def derive_bases(basis_seed: BitString, n: int, stream: int = 0) -> np.ndarray:
    """Expand the basis seed into n bases (0 = Z, 1 = Y) for block ``stream``."""
    if n < 1:
        raise ContractError("need n >= 1")
    gen = RngStream.from_bits(basis_seed, stream_id=BASIS_STREAM).substream(stream).generator
    return gen.integers(0, 2, size=n, dtype=np.uint8)


@dataclass(frozen=True)
class BlockMeta:
    m: int
    n_rs: int
    k_rs: int
    n_qubits: int
    epsilon: float
    n_blocks: int
    msg_bits: int
    pad_bits: int


@dataclass(frozen=True)
class FhsCiphertext:
    symbols: QubitBlock
    block_meta: BlockMeta


def _code_of(meta: BlockMeta) -> ConcatenatedCode:
    return ConcatenatedCode.from_params(meta.m, meta.n_rs, meta.k_rs)


def session_qubits(msg_bits: int, code: ConcatenatedCode = PRODUCTION_CODE) -> int:
    """Qubits a message of ``msg_bits`` occupies after padding and encoding."""
    n_blocks = max(1, -(-msg_bits // code.message_bits))
    return n_blocks * code.codeword_bits


def block_permutations(key: LockingKey, code: ConcatenatedCode, n_blocks: int) -> list[Permutation]:
    return [derive_permutation(key.perm_seed, code.codeword_bits, stream=b) for b in range(n_blocks)]


def block_bases(key: LockingKey, code: ConcatenatedCode, n_blocks: int) -> np.ndarray:
    """Flat basis string of a session, block after block."""
    if n_blocks == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate([derive_bases(key.basis_seed, code.codeword_bits, stream=b)
                           for b in range(n_blocks)])


def fhs_encode(msg: BitString, key: LockingKey, code: ConcatenatedCode = PRODUCTION_CODE,
               permute: bool = True) -> FhsCiphertext:
    """Lock a message. The last block is zero-padded to the code capacity."""
    if msg.length < 1:
        raise ContractError("empty message")
    k = code.message_bits
    n_blocks = -(-msg.length // k)
    pad = n_blocks * k - msg.length
    total = n_blocks * code.codeword_bits
    if total > key.security.n_qubits:
        raise ContractError(f"key covers {key.security.n_qubits} qubits, session needs {total}")
    bits = np.concatenate([msg.bits, np.zeros(pad, dtype=np.uint8)]).reshape(n_blocks, k)
    cw = code.encode_batch(bits)
    if permute:
        for b, p in enumerate(block_permutations(key, code, n_blocks)):
            cw[b] = apply_permutation(p, cw[b])
    bases = block_bases(key, code, n_blocks)
    meta = BlockMeta(code.outer.m, code.outer.n_rs, code.outer.k_rs, key.security.n_qubits,
                     key.security.epsilon, n_blocks, msg.length, pad)
    return FhsCiphertext(QubitBlock(bases, cw.reshape(-1)), meta)


def receiver_bases(key: LockingKey, meta: BlockMeta) -> np.ndarray:
    return block_bases(key, _code_of(meta), meta.n_blocks)


def fhs_decode_blocks(outcomes: np.ndarray, key: LockingKey, meta: BlockMeta,
                      force: bool = False, permute: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Per-block decode. Returns (message bits of shape (B, k), ok mask)."""
    code = _code_of(meta)
    outcomes = np.asarray(outcomes, dtype=np.int8)
    if outcomes.size != meta.n_blocks * code.codeword_bits:
        raise ContractError("outcome count does not match the ciphertext")
    words = outcomes.reshape(meta.n_blocks, code.codeword_bits).copy()
    if permute:
        for b, p in enumerate(block_permutations(key, code, meta.n_blocks)):
            words[b] = apply_permutation(invert_permutation(p), words[b])
    return code.decode_batch(words, force=force)


def fhs_decode(outcomes: np.ndarray, key: LockingKey, meta: BlockMeta, force: bool = False,
               permute: bool = True) -> BitString:
    """Unlock a session: unpermute (erasures travel with their positions) and decode.

    Raises DecodeFailure listing the failed blocks unless ``force`` is set, in
    which case rejected blocks are filled with the decoder's best guess.
    """
    bits, ok = fhs_decode_blocks(outcomes, key, meta, force=force, permute=permute)
    if not force and not ok.all():
        raise DecodeFailure(f"blocks {np.flatnonzero(~ok).tolist()} uncorrectable")
    return BitString(bits.reshape(-1)[: meta.msg_bits])


def outcomes_to_word(outcomes) -> np.ndarray:
    """ChannelOutcome list -> {0, 1, LOST} int8 array."""
    return np.array([LOST if o.bit is None else o.bit for o in outcomes], dtype=np.int8)
