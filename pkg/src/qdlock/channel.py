"""Lossy single-photon channel with mutually unbiased Z/Y measurement.

Because every prepared state is a Z or Y eigenstate, measurement statistics
reduce to two branches: a matched basis returns the prepared bit (flipped
with probability e_b), a mismatched basis returns a fair coin. Loss is an
independent erasure with probability 1 - eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LOST, Basis, ChannelParams, ContractError, QubitBlock, QubitSymbol, RngStream


@dataclass(frozen=True)
class ChannelOutcome:
    """Detected(bit) when ``bit`` is 0/1, Lost when ``bit`` is None."""

    bit: int | None

    @property
    def lost(self) -> bool:
        return self.bit is None

    def __post_init__(self):
        if self.bit not in (None, 0, 1):
            raise ContractError("Detected carries exactly one bit")

    def code(self) -> int:
        return LOST if self.bit is None else self.bit


def Detected(bit: int) -> ChannelOutcome:
    return ChannelOutcome(int(bit))


Lost = ChannelOutcome(None)

# Block size for drawing randomness, keeps memory bounded on long blocks.
_CHUNK = 1 << 22


def _measure(bits, prep, meas, params: ChannelParams, gen: np.random.Generator) -> np.ndarray:
    n = bits.size
    detected = gen.random(n) < params.eta
    flip = (gen.random(n) < params.e_b).astype(np.uint8)
    coin = gen.integers(0, 2, size=n, dtype=np.uint8)
    value = np.where(prep == meas, bits ^ flip, coin).astype(np.int8)
    value[~detected] = LOST
    return value


def transmit_block(qs: QubitBlock | Sequence[QubitSymbol], bases, params: ChannelParams,
                   rng: RngStream) -> np.ndarray:
    """Send a block and measure symbol i in ``bases[i]``.

    Returns an int8 array of outcomes: 0/1 for a detection, LOST (-1) for an
    erasure. Randomness is drawn in fixed-size chunks in symbol order, so the
    result depends only on the stream and the block.
    """
    if not isinstance(qs, QubitBlock):
        qs = QubitBlock.from_symbols(list(qs))
    meas = np.asarray([int(b) for b in bases] if isinstance(bases, (list, tuple)) else bases,
                      dtype=np.uint8)
    if meas.shape != qs.bits.shape:
        raise ContractError(f"{len(qs)} symbols but {meas.size} measurement bases")
    out = np.empty(len(qs), dtype=np.int8)
    gen = rng.generator
    for start in range(0, len(qs), _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = _measure(qs.bits[sl], qs.bases[sl], meas[sl], params, gen)
    return out


def transmit_and_measure(q: QubitSymbol, measure_basis: Basis, params: ChannelParams,
                         rng: RngStream) -> ChannelOutcome:
    value = transmit_block(QubitBlock.from_symbols([q]), [measure_basis], params, rng)[0]
    return Lost if value == LOST else Detected(int(value))


def to_outcomes(values: np.ndarray) -> list[ChannelOutcome]:
    return [Lost if v == LOST else Detected(int(v)) for v in values]
