import math

import numpy as np
import pytest

from qdlock.channel import transmit_block
from qdlock.core import ERASED, LOST, ChannelParams, ContractError, QubitBlock, RngStream
from qdlock.fec import (
    RepetitionPlan, expand_bases, fec_collapse, fec_expand, leakage_with_fec, log_loss_probability,
    recovery_probability, repetition_factor, transmit_repeated,
)


def test_repetition_factor_examples():
    assert repetition_factor(1.0) == 50
    assert repetition_factor(0.33) == 152
    assert repetition_factor(0.5) == 100
    assert repetition_factor(0.1) == 500
    assert RepetitionPlan.for_eta(0.33).m == 152
    with pytest.raises(ContractError):
        repetition_factor(0.0)


def test_repetition_factor_is_smallest_sufficient():
    for eta in np.linspace(0.01, 1.0, 397):
        m = repetition_factor(float(eta))
        assert m * eta >= 50 - 1e-9 and (m - 1) * eta < 50


def test_recovery_probability():
    assert recovery_probability(1.0, 7) == 1.0
    assert recovery_probability(0.0, 7) == 0.0
    assert recovery_probability(0.5, 3) == pytest.approx(0.875, rel=1e-15)


def test_log_domain_bound():
    # (1 - 0.33)^152 <= exp(-50) in natural-log form
    assert log_loss_probability(0.33, 152) <= -50.0
    assert log_loss_probability(0.33, 152) == pytest.approx(152 * math.log(0.67), rel=1e-14)
    for eta in (0.05, 0.2, 0.33, 0.54, 0.9):
        assert log_loss_probability(eta, repetition_factor(eta)) <= -50.0


def test_expand_collapse_examples():
    blk = QubitBlock(np.array([0, 1]), np.array([1, 0]))
    assert fec_expand(blk, 1) == blk
    big = fec_expand(blk, 3)
    assert big.bases.tolist() == [0, 0, 0, 1, 1, 1] and big.bits.tolist() == [1, 1, 1, 0, 0, 0]
    out = np.array([LOST, LOST, LOST, 1, LOST, 1, 0, 1, LOST, 0, 0, 1], dtype=np.int8)
    assert fec_collapse(out, 3).tolist() == [ERASED, 1, ERASED, 0]
    with pytest.raises(ContractError):
        fec_collapse(out, 5)


def test_leakage_bookkeeping():
    assert leakage_with_fec(0.25, 152) == 0.25 * 152


def test_small_m_group_loss_rate(rng):
    eta, m, groups = 0.4, 4, 200000
    blk = QubitBlock(np.zeros(groups), rng.integers(0, 2, groups))
    big = fec_expand(blk, m)
    out = fec_collapse(transmit_block(big, big.bases, ChannelParams(eta), RngStream(6)), m)
    lost = float((out == ERASED).mean())
    p = (1 - eta) ** m
    assert abs(lost - p) < 3 * math.sqrt(p * (1 - p) / groups)
    det = out != ERASED
    assert np.array_equal(out[det], blk.bits[det])


@pytest.mark.parametrize("matched", [True, False])
def test_fused_matches_literal_distribution(rng, matched):
    n, m = 40000, 5
    params = ChannelParams(0.3, 0.05)
    blk = QubitBlock(np.zeros(n), rng.integers(0, 2, n))
    bases = np.zeros(n, dtype=np.uint8) if matched else np.ones(n, dtype=np.uint8)
    lit = fec_collapse(transmit_block(fec_expand(blk, m), expand_bases(bases, m), params, RngStream(1)), m)
    fus = transmit_repeated(blk, bases, m, params, RngStream(2))
    for cls in (ERASED, 0, 1):
        a = float((lit == cls).mean())
        b = float((fus == cls).mean())
        pooled = (a + b) / 2
        assert abs(a - b) < 4 * math.sqrt(2 * pooled * (1 - pooled) / n) + 1e-12
    agree_l = float((lit[lit != ERASED] == blk.bits[lit != ERASED]).mean())
    agree_f = float((fus[fus != ERASED] == blk.bits[fus != ERASED]).mean())
    assert abs(agree_l - agree_f) < 0.02


def test_production_factor_recovers_everything(rng):
    n = 10**6
    blk = QubitBlock(np.zeros(n), rng.integers(0, 2, n))
    out = transmit_repeated(blk, blk.bases, 152, ChannelParams(0.33, 0.004), RngStream(3))
    assert not (out == ERASED).any()
    assert np.array_equal(out, blk.bits)
