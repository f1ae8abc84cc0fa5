"""Per-qubit repetition for the lossy channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ERASED, ChannelParams, ContractError, QubitBlock, RngStream

REPETITION_TARGET = 50


def repetition_factor(eta: float, target: int = REPETITION_TARGET) -> int:
    """ceil(target / eta), computed so exact quotients are not rounded up."""
    if not 0.0 < eta <= 1.0:
        raise ContractError("repetition needs 0 < eta <= 1")
    q = target / eta
    m = math.ceil(q)
    # 50/0.5 style quotients can land one ulp above an integer
    if m - 1 >= target and (m - 1) * eta >= target:
        m -= 1
    return m


@dataclass(frozen=True)
class RepetitionPlan:
    eta: float
    m: int

    @classmethod
    def for_eta(cls, eta: float) -> "RepetitionPlan":
        return cls(eta, repetition_factor(eta))


def recovery_probability(eta: float, m: int) -> float:
    if not 0.0 <= eta <= 1.0 or m < 1:
        raise ContractError("need 0 <= eta <= 1 and m >= 1")
    return -math.expm1(m * math.log1p(-eta)) if eta < 1.0 else 1.0


def log_loss_probability(eta: float, m: int) -> float:
    """Natural log of (1 - eta)^m, the probability a whole group is lost."""
    if eta >= 1.0:
        return -math.inf
    return m * math.log1p(-eta)


def fec_expand(symbols: QubitBlock, m: int) -> QubitBlock:
    if m < 1:
        raise ContractError("repetition factor must be >= 1")
    return QubitBlock(np.repeat(symbols.bases, m), np.repeat(symbols.bits, m))


def expand_bases(bases: np.ndarray, m: int) -> np.ndarray:
    return np.repeat(np.asarray(bases, dtype=np.uint8), m)


def _vote(ones: np.ndarray, zeros: np.ndarray) -> np.ndarray:
    out = np.full(ones.shape, ERASED, dtype=np.int8)
    out[ones > zeros] = 1
    out[zeros > ones] = 0
    return out


def fec_collapse(outcomes: np.ndarray, m: int) -> np.ndarray:
    """Majority vote per group of m; an all-lost group or a tie is ERASED."""
    outcomes = np.asarray(outcomes, dtype=np.int8)
    if m < 1 or outcomes.size % m:
        raise ContractError(f"{outcomes.size} outcomes do not split into groups of {m}")
    g = outcomes.reshape(-1, m)
    return _vote((g == 1).sum(axis=1), (g == 0).sum(axis=1))


_GROUP_CHUNK = 1 << 22


def transmit_repeated(symbols: QubitBlock, bases: np.ndarray, m: int, params: ChannelParams,
                      rng: RngStream) -> np.ndarray:
    """fec_collapse(transmit_block(fec_expand(...))) sampled group-wise.

    Within a group the m copies are i.i.d., so only the counts matter:
    detections ~ Binomial(m, eta); among them, ones ~ Binomial(d, 1 - e_b)
    for a one sent in the matched basis (e_b for a zero) and
    Binomial(d, 1/2) in the conjugate basis. The result has the same
    distribution as the literal pipeline at a cost independent of m.
    """
    bases = np.asarray(bases, dtype=np.uint8)
    if bases.shape != symbols.bits.shape:
        raise ContractError("one measurement basis per symbol")
    if m < 1:
        raise ContractError("repetition factor must be >= 1")
    gen = rng.generator
    out = np.empty(len(symbols), dtype=np.int8)
    for start in range(0, len(symbols), _GROUP_CHUNK):
        sl = slice(start, start + _GROUP_CHUNK)
        bits = symbols.bits[sl]
        matched = symbols.bases[sl] == bases[sl]
        d = gen.binomial(m, params.eta, size=bits.size)
        p_one = np.where(matched, np.where(bits == 1, 1.0 - params.e_b, params.e_b), 0.5)
        ones = gen.binomial(d, p_one)
        out[sl] = _vote(ones, d - ones)
    return out


def leakage_with_fec(base_bound: float, m: int) -> float:
    """Eve's keyless bound grows by the repetition factor."""
    return base_bound * m

