from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    hadamard_bit, hadamard_ml_bruteforce, lagrange_coeffs, rs_bruteforce_decode, rs_evaluate,
)
from qdlock.coding import (
    PRODUCTION_CODE, ConcatenatedCode, HadamardCode, ReedSolomonCode, concat_decode,
    concat_encode, gf, hadamard_decode, hadamard_encode, rs_decode, rs_encode,
)
from qdlock.core import ERASED, BitString, ContractError, DecodeFailure

B = BitString.from_str
RS73 = ReedSolomonCode(3, 7, 3)
SMALL = ConcatenatedCode.from_params(3, 7, 3)


# --- field ---------------------------------------------------------------

@pytest.mark.parametrize("m,poly", [(3, 0b1011), (6, 0b1000011), (8, 0x11D)])
def test_published_primitive_polys(m, poly):
    F = gf(m)
    assert F.poly == poly
    assert sorted(F.exp[: F.q1].tolist()) == list(range(1, 1 << m))


def test_field_tables_match_carryless_oracle():
    from oracles import clmul_mod
    F = gf(6)
    for a in range(64):
        for b in range(64):
            assert F.mul(a, b) == clmul_mod(a, b, 6, F.poly)
        if a:
            assert F.mul(a, F.inv(a)) == 1


# --- Hadamard ---------------------------------------------------------------

@pytest.mark.parametrize("k,msg,expected", [
    (3, "000", "00000000"),
    (2, "01", "0101"),
    (3, "101", "01011010"),
])
def test_hadamard_encode_examples(k, msg, expected):
    assert hadamard_encode(HadamardCode(k), B(msg)) == B(expected)


def test_hadamard_encode_matches_inner_product_definition():
    for k in range(1, 7):
        code = HadamardCode(k)
        for u in range(1 << k):
            cw = hadamard_encode(code, BitString.from_int(u, k))
            assert [cw[j] for j in range(code.n)] == [hadamard_bit(u, j) for j in range(code.n)]


@pytest.mark.parametrize("k", range(1, 7))
def test_hadamard_distance_bruteforce(k):
    code = HadamardCode(k)
    t = code.table.astype(int)
    dists = [int((t[a] != t[b]).sum()) for a, b in combinations(range(code.n), 2)]
    assert code.n == 2**k
    assert min(dists) == code.d == 2 ** (k - 1)


def test_hadamard_wrong_length():
    with pytest.raises(ContractError):
        hadamard_encode(HadamardCode(3), B("10"))


def test_hadamard_decode_examples():
    code = HadamardCode(3)
    cw = hadamard_encode(code, B("101")).bits.astype(np.int8)
    assert hadamard_decode(code, cw) == (B("101"), 8)
    # unique decoding within half distance, (d - 1) // 2 = 1 flip for k = 3
    for j in range(8):
        w = cw.copy()
        w[j] ^= 1
        assert hadamard_decode(code, w)[0] == B("101")
    msg, conf = hadamard_decode(code, np.full(8, ERASED, dtype=np.int8))
    assert msg == B("000") and conf == 0


def test_hadamard_within_half_distance_k6(rng):
    code = HadamardCode(6)
    for _ in range(50):
        u = int(rng.integers(64))
        w = code.table[u].astype(np.int8)
        flips = rng.choice(64, size=(code.d - 1) // 2, replace=False)
        w[flips] ^= 1
        assert int(code.decode_batch(w[None])[0][0]) == u


@pytest.mark.parametrize("k", range(1, 7))
def test_hadamard_ml_equals_exhaustive(k, rng):
    code = HadamardCode(k)
    words = rng.integers(-1, 2, size=(40, code.n)).astype(np.int8)
    values, conf = code.decode_batch(words)
    for w, v, c in zip(words, values, conf):
        assert (int(v), int(c)) == hadamard_ml_bruteforce(w.tolist(), k)


# --- Reed-Solomon --------------------------------------------------------------

def test_rs_zero_message():
    assert not rs_encode(PRODUCTION_CODE.outer, [0] * 42).any()


def test_rs_encoding_matches_evaluation_oracle(rng):
    for code in (RS73, ReedSolomonCode(6, 63, 42), ReedSolomonCode(8, 20, 7)):
        for _ in range(5):
            msg = rng.integers(0, code.field.order, size=code.k_rs).tolist()
            assert rs_encode(code, msg).tolist() == rs_evaluate(msg, code.n_rs, code.m, code.field.poly)


def test_rs73_distance_bruteforce():
    cws = np.array([rs_encode(RS73, list(m)) for m in product(range(8), repeat=3)])
    assert len(cws) == 512
    dmin = min(int((cws[a] != cws[b]).sum()) for a, b in combinations(range(512), 2))
    assert dmin == RS73.d_rs == 5


def test_rs_symbol_range():
    with pytest.raises(ContractError):
        rs_encode(RS73, [8, 0, 0])


def test_rs_erasure_recovery_lagrange_oracle(rng):
    poly = RS73.field.poly
    points = RS73.points.tolist()
    for erased in combinations(range(7), 4):
        msg = rng.integers(0, 8, size=3).tolist()
        cw = rs_encode(RS73, msg).tolist()
        keep = [i for i in range(7) if i not in erased]
        oracle = lagrange_coeffs([points[i] for i in keep], [cw[i] for i in keep], 3, poly)
        word = [None if i in erased else cw[i] for i in range(7)]
        assert rs_decode(RS73, word).tolist() == oracle == msg


def test_rs_erasures_production_code(rng):
    code = PRODUCTION_CODE.outer
    for _ in range(20):
        msg = rng.integers(0, 64, size=42)
        word = rs_encode(code, msg).tolist()
        for i in rng.choice(63, size=21, replace=False):
            word[i] = None
        assert np.array_equal(rs_decode(code, word), msg)


def test_rs_errors_and_erasures_vs_bruteforce(rng):
    poly = RS73.field.poly
    for t, e in [(0, 4), (1, 2), (2, 0), (1, 1), (0, 1)]:
        for _ in range(10):
            msg = rng.integers(0, 8, size=3).tolist()
            word = rs_encode(RS73, msg).tolist()
            pos = rng.choice(7, size=t + e, replace=False)
            for i in pos[:t]:
                word[i] ^= int(rng.integers(1, 8))
            for i in pos[t:]:
                word[i] = None
            assert rs_decode(RS73, word).tolist() == msg == rs_bruteforce_decode(word, 3, 7, 3, poly)


def test_rs_beyond_radius_never_returns_original(rng):
    for _ in range(30):
        msg = rng.integers(0, 8, size=3)
        word = rs_encode(RS73, msg).tolist()
        for i in rng.choice(7, size=3, replace=False):
            word[i] ^= int(rng.integers(1, 8))
        try:
            got = rs_decode(RS73, word)
        except DecodeFailure:
            continue
        assert not np.array_equal(got, msg)


def test_rs_too_many_erasures():
    with pytest.raises(DecodeFailure):
        rs_decode(RS73, [None] * 5 + [0, 0])


# --- concatenation --------------------------------------------------------------

def test_concat_parameters():
    assert PRODUCTION_CODE.rate == 252 / 4032 == 1 / 16
    assert PRODUCTION_CODE.message_bits == 252 and PRODUCTION_CODE.codeword_bits == 4032
    with pytest.raises(ContractError):
        ConcatenatedCode(ReedSolomonCode(6, 63, 42), HadamardCode(5))


def test_concat_zero_message():
    assert not concat_encode(PRODUCTION_CODE, BitString.zeros(252)).bits.any()


def test_concat_small_distance_bruteforce():
    msgs = np.array(list(product((0, 1), repeat=9)), dtype=np.uint8)
    cws = SMALL.encode_batch(msgs).astype(np.int16)
    assert cws.shape == (512, 56)
    dmin = cws.shape[1]
    for a in range(512):
        d = (cws[a + 1:] != cws[a]).sum(axis=1)
        if d.size:
            dmin = min(dmin, int(d.min()))
    assert dmin == SMALL.min_distance == 20


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linearity(seed):
    g = np.random.default_rng(seed)
    a, b = g.integers(0, 2, size=(2, 252), dtype=np.uint8)
    enc = PRODUCTION_CODE.encode_batch
    assert np.array_equal(enc((a ^ b)[None])[0], enc(a[None])[0] ^ enc(b[None])[0])
    h = HadamardCode(6)
    u, v = (int(x) for x in g.integers(0, 64, size=2))
    assert np.array_equal(h.table[u ^ v], h.table[u] ^ h.table[v])


def test_concat_roundtrip_1000(rng):
    msgs = rng.integers(0, 2, size=(1000, 252), dtype=np.uint8)
    bits, ok = PRODUCTION_CODE.decode_batch(PRODUCTION_CODE.encode_batch(msgs).astype(np.int8))
    assert ok.all() and np.array_equal(bits, msgs)


def test_concat_scalar_api(rng):
    msg = BitString(rng.integers(0, 2, size=252))
    assert concat_decode(PRODUCTION_CODE, concat_encode(PRODUCTION_CODE, msg).bits.astype(np.int8)) == msg
    with pytest.raises(DecodeFailure):
        concat_decode(PRODUCTION_CODE, np.full(4032, ERASED, dtype=np.int8))


def test_concat_30pct_erasures(rng):
    msgs = rng.integers(0, 2, size=(100, 252), dtype=np.uint8)
    cw = PRODUCTION_CODE.encode_batch(msgs).astype(np.int8)
    cw[rng.random(cw.shape) < 0.30] = ERASED
    bits, ok = PRODUCTION_CODE.decode_batch(cw)
    rate = float((ok & (bits == msgs).all(axis=1)).mean())
    assert rate >= 0.99
    # measured: 1.0


def test_zero_confidence_inner_blocks_become_erasures():
    w = SMALL.encode_batch(np.zeros((1, 9), dtype=np.uint8)).astype(np.int8)
    w[0, :16] = ERASED
    _, conf = SMALL.inner.decode_batch(w[0, :8][None])
    assert conf[0] == 0
    bits, ok = SMALL.decode_batch(w)
    assert ok[0] and not bits.any()


def test_force_decode_fills_rejected_blocks(rng):
    w = rng.integers(0, 2, size=(5, 4032)).astype(np.int8)
    _, ok = PRODUCTION_CODE.decode_batch(w)
    forced, ok2 = PRODUCTION_CODE.decode_batch(w, force=True)
    assert not ok.any() and not ok2.any()
    assert forced.any()


def test_decoder_rejects_bad_symbols():
    with pytest.raises(ContractError):
        PRODUCTION_CODE.inner.decode_batch(np.full((1, 64), 2))


# --- backends -------------------------------------------------------------------

def test_jit_kernels_match_python(rng):
    from qdlock._jit import JIT_ENABLED
    from qdlock.coding import _kernels as K
    if not JIT_ENABLED:
        pytest.skip("numba disabled")
    soft = rng.integers(-1, 2, size=(30, 64)).astype(np.int32)
    assert np.array_equal(K.fwht_kernel(soft), K.fwht_kernel.py_func(soft))
    assert np.array_equal(K.fwht_kernel(soft), K.fwht_numpy(soft))
    F = gf(6)
    msgs = rng.integers(0, 64, size=(20, 42))
    a = K.rs_encode_batch_kernel(msgs, 63, F.exp, F.log, F.q1)
    assert np.array_equal(a, K.rs_encode_batch_numpy(msgs, 63, F.exp, F.log, F.q1))
    words = a.copy()
    words[rng.random(words.shape) < 0.3] = -1
    pts = PRODUCTION_CODE.outer.points
    got = K.rs_decode_batch_kernel(words, pts, 42, F.mul_table, F.inv_table)
    ref = K.rs_decode_batch_kernel.py_func(words, pts, 42, F.mul_table, F.inv_table)
    assert np.array_equal(got[0], ref[0]) and np.array_equal(got[1], ref[1])
    draws = np.array([0] + [int(rng.integers(0, i + 1)) for i in range(1, 100)])
    assert np.array_equal(K.fisher_yates_kernel(draws), K.fisher_yates_kernel.py_func(draws))


def test_numpy_fallback_subprocess_agrees():
    import os
    import subprocess
    import sys
    script = (
        "import numpy as np, hashlib\n"
        "from qdlock.coding import PRODUCTION_CODE as C\n"
        "g = np.random.default_rng(5)\n"
        "m = g.integers(0, 2, size=(40, 252), dtype=np.uint8)\n"
        "w = C.encode_batch(m).astype(np.int8)\n"
        "w[g.random(w.shape) < 0.4] = -1\n"
        "b, ok = C.decode_batch(w)\n"
        "print(hashlib.sha256(w.tobytes() + b.astype(np.uint8).tobytes() + ok.tobytes()).hexdigest())\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, QDLOCK_DISABLE_JIT=flag)
        r = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True)
        outs.append(r.stdout.strip())
    assert outs[0] == outs[1]
