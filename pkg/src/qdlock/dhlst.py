"""One-bit-key locking: the key bit picks Z (0) or Y (1) for the whole message."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import mutual_info_rate, plugin_mutual_info
from .channel import transmit_block
from .core import LOST, BitString, ChannelParams, ContractError, QubitBlock, RngStream, draw_bits


@dataclass(frozen=True)
class DhlstKey:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ContractError("DHLST key is a single bit")

    @property
    def length(self) -> int:
        return 1


def dhlst_encode(msg: BitString, key: DhlstKey) -> QubitBlock:
    if msg.length < 1:
        raise ContractError("empty message")
    return QubitBlock(np.full(msg.length, key.bit, dtype=np.uint8), msg.bits)


def dhlst_bases(key: DhlstKey, n: int) -> np.ndarray:
    return np.full(n, key.bit, dtype=np.uint8)


def dhlst_decode(outcomes: np.ndarray, key: DhlstKey) -> np.ndarray:
    """Detected bits pass through, losses stay ERASED."""
    outcomes = np.asarray(outcomes, dtype=np.int8)
    if outcomes.size and (outcomes.min() < LOST or outcomes.max() > 1):
        raise ContractError("outcomes must be 0, 1 or LOST")
    return outcomes.copy()


def dhlst_locked_bound(n: int) -> float:
    if n < 0:
        raise ContractError("n must be non-negative")
    return n / 2


@dataclass(frozen=True)
class DhlstRun:
    n: int
    detected: int
    errors: int
    i_acc_analytic: float
    i_acc_mc: float
    i_acc_mc_stderr: float

    @property
    def eta_measured(self) -> float:
        return self.detected / self.n

    @property
    def e_b_measured(self) -> float:
        return self.errors / self.detected if self.detected else 0.0


def simulate_dhlst(n: int, key: DhlstKey, params: ChannelParams, rng: RngStream) -> DhlstRun:
    """Random n-bit message through encode, channel (correct key) and decode."""
    msg = draw_bits(rng.substream(0), n)
    sent = dhlst_encode(msg, key)
    out = transmit_block(sent, dhlst_bases(key, n), params, rng.substream(1))
    got = dhlst_decode(out, key)
    det = got != LOST
    errors = int(np.count_nonzero(got[det] != msg.bits[det]))
    mi, se = plugin_mutual_info(msg.bits, got)
    return DhlstRun(n, int(det.sum()), errors, mutual_info_rate(params.eta, params.e_b), mi, se)


def fixed_basis_eavesdropper(n_blocks: int, block_bits: int, params: ChannelParams,
                             rng: RngStream, eve_basis: int = 0) -> tuple[float, float]:
    """Information per sent bit of an eavesdropper measuring every block in one basis.

    Each block is locked with a fresh uniform key bit. The estimate is
    genie-aided: the key bit is revealed to Eve after measurement, so blocks
    in her basis count at their plug-in information and conjugate blocks at
    theirs (about zero). Returns (bits per sent bit, standard error).
    """
    gen = rng.substream(0).generator
    keys = gen.integers(0, 2, size=n_blocks)
    per_block = np.empty(n_blocks)
    for b in range(n_blocks):
        key = DhlstKey(int(keys[b]))
        msg = draw_bits(rng.substream(1, b), block_bits)
        out = transmit_block(dhlst_encode(msg, key), np.full(block_bits, eve_basis, dtype=np.uint8),
                             params, rng.substream(2, b))
        per_block[b], _ = plugin_mutual_info(msg.bits, out)
    return float(per_block.mean()), float(per_block.std(ddof=1) / np.sqrt(n_blocks))
