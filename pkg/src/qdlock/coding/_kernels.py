"""
Hot loops of the codec: GF(2^m) polynomial arithmetic, Gao error-and-erasure
decoding, Walsh-Hadamard correlation, Fisher-Yates shuffling.

Every kernel here is written in the nopython subset so that ``njit`` can
compile it. With ``QDLOCK_DISABLE_JIT=1`` the decorator is a no-op and the
public wrappers switch to vectorised numpy where one exists.
"""

import numpy as np

from .._jit import JIT_ENABLED, njit

# --- GF(2^m) polynomial helpers; mt is the full multiplication table and
# it the inverse table (it[0] unused) ---


@njit(cache=True)
def _deg(p):
    for i in range(p.shape[0] - 1, -1, -1):
        if p[i] != 0:
            return i
    return -1


@njit(cache=True)
def _peval(p, x, mt):
    acc = 0
    for i in range(p.shape[0] - 1, -1, -1):
        acc = mt[acc, x] ^ p[i]
    return acc


@njit(cache=True)
def _pdivmod(a, b, mt, it):
    """Quotient and remainder of a / b; both returned at len(a)."""
    r = a.copy()
    q = np.zeros(a.shape[0], dtype=np.int64)
    db = _deg(b)
    da = _deg(r)
    if da < db:
        return q, r
    inv_lead = it[b[db]]
    for i in range(da - db, -1, -1):
        c = r[i + db]
        if c != 0:
            coef = mt[c, inv_lead]
            q[i] = coef
            for j in range(db + 1):
                r[i + j] ^= mt[coef, b[j]]
    return q, r


@njit(cache=True)
def _pmul(a, b, mt, size):
    out = np.zeros(size, dtype=np.int64)
    da = _deg(a)
    db = _deg(b)
    for i in range(da + 1):
        if a[i] == 0:
            continue
        for j in range(db + 1):
            if i + j < size:
                out[i + j] ^= mt[a[i], b[j]]
    return out


@njit(cache=True)
def gao_decode(xs, ys, k, mt, it):
    """Decode a Reed-Solomon evaluation word at distinct points ``xs``.

    Returns ``(ok, coeffs)`` where ``coeffs`` has length ``k``. Corrects t
    errors whenever 2t <= len(xs) - k. Erasures are handled by the caller
    simply omitting those points.
    """
    n = xs.shape[0]
    f_out = np.zeros(k, dtype=np.int64)
    if n < k:
        return False, f_out
    size = n + 2
    # g0 = prod (X - x_i)
    g0 = np.zeros(size, dtype=np.int64)
    g0[0] = 1
    for i in range(n):
        xi = xs[i]
        for d in range(i + 1, 0, -1):
            g0[d] = g0[d - 1] ^ mt[g0[d], xi]
        g0[0] = mt[g0[0], xi]
    # g1 = Lagrange interpolant of (xs, ys)
    g1 = np.zeros(size, dtype=np.int64)
    num = np.zeros(size, dtype=np.int64)
    for i in range(n):
        if ys[i] == 0:
            continue
        xi = xs[i]
        # synthetic division g0 / (X - x_i), quotient has degree n-1
        num[:] = 0
        num[n - 1] = g0[n]
        for d in range(n - 1, 0, -1):
            num[d - 1] = g0[d] ^ mt[num[d], xi]
        scale = mt[ys[i], it[_peval(num, xi, mt)]]
        for d in range(n):
            g1[d] ^= mt[scale, num[d]]
    # partial extended Euclid on (g0, g1)
    r0 = g0
    r1 = g1
    v0 = np.zeros(size, dtype=np.int64)
    v1 = np.zeros(size, dtype=np.int64)
    v1[0] = 1
    while 2 * _deg(r1) >= n + k:
        q, rem = _pdivmod(r0, r1, mt, it)
        v_new = v0 ^ _pmul(q, v1, mt, size)
        r0 = r1
        r1 = rem
        v0 = v1
        v1 = v_new
    f, rem = _pdivmod(r1, v1, mt, it)
    if _deg(rem) >= 0 or _deg(f) >= k:
        return False, f_out
    for d in range(k):
        f_out[d] = f[d]
    mismatches = 0
    for i in range(n):
        if _peval(f_out, xs[i], mt) != ys[i]:
            mismatches += 1
    if 2 * mismatches > n - k:
        return False, f_out
    return True, f_out


@njit(cache=True)
def rs_decode_batch_kernel(words, points, k, mt, it):
    """Decode each row of ``words`` (negative entries are erasures)."""
    nb, n = words.shape
    msgs = np.zeros((nb, k), dtype=np.int64)
    ok = np.zeros(nb, dtype=np.bool_)
    xs = np.empty(n, dtype=np.int64)
    ys = np.empty(n, dtype=np.int64)
    for b in range(nb):
        cnt = 0
        for i in range(n):
            if words[b, i] >= 0:
                xs[cnt] = points[i]
                ys[cnt] = words[b, i]
                cnt += 1
        good, f = gao_decode(xs[:cnt].copy(), ys[:cnt].copy(), k, mt, it)
        ok[b] = good
        if good:
            msgs[b, :] = f
    return msgs, ok


@njit(cache=True)
def rs_encode_batch_kernel(msgs, n, exp, log, q1):
    nb, k = msgs.shape
    out = np.zeros((nb, n), dtype=np.int64)
    for b in range(nb):
        for i in range(n):
            acc = 0
            for j in range(k):
                c = msgs[b, j]
                if c != 0:
                    acc ^= exp[(log[c] + i * j) % q1]
            out[b, i] = acc
    return out


def rs_encode_batch_numpy(msgs, n, exp, log, q1):
    msgs = np.asarray(msgs, dtype=np.int64)
    nb, k = msgs.shape
    i = np.arange(n)[:, None]
    j = np.arange(k)[None, :]
    ij = (i * j) % q1                                      # (n, k)
    logs = log[msgs]                                       # (nb, k)
    terms = exp[(logs[:, None, :] + ij[None, :, :]) % q1]  # (nb, n, k)
    terms = np.where(msgs[:, None, :] != 0, terms, 0)
    return np.bitwise_xor.reduce(terms, axis=2)


@njit(cache=True)
def fwht_kernel(soft):
    """In-place-per-row Walsh-Hadamard transform of an integer matrix."""
    nb, n = soft.shape
    out = soft.copy()
    for b in range(nb):
        h = 1
        while h < n:
            for i in range(0, n, 2 * h):
                for j in range(i, i + h):
                    x = out[b, j]
                    y = out[b, j + h]
                    out[b, j] = x + y
                    out[b, j + h] = x - y
            h *= 2
    return out


def sylvester(k):
    """Sign matrix H[u, j] = (-1)^popcount(u & j) of order 2^k."""
    n = 1 << k
    idx = np.arange(n)
    pc = np.zeros((n, n), dtype=np.int64)
    anded = idx[:, None] & idx[None, :]
    for bit in range(k):
        pc += (anded >> bit) & 1
    return np.where(pc % 2 == 0, 1, -1).astype(np.int32)


def fwht_numpy(soft):
    n = soft.shape[1]
    k = n.bit_length() - 1
    return soft @ sylvester(k)


@njit(cache=True)
def fisher_yates_kernel(draws):
    """Shuffle arange(n) using draws[i] in [0, i] for i = n-1 .. 1."""
    n = draws.shape[0]
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = draws[i]
        t = perm[i]
        perm[i] = perm[j]
        perm[j] = t
    return perm


def fwht(soft):
    soft = np.ascontiguousarray(soft, dtype=np.int32)
    if JIT_ENABLED:
        return fwht_kernel(soft)
    return fwht_numpy(soft)


def rs_encode_batch(msgs, n, exp, log, q1):
    msgs = np.ascontiguousarray(msgs, dtype=np.int64)
    if JIT_ENABLED:
        return rs_encode_batch_kernel(msgs, n, exp, log, q1)
    return rs_encode_batch_numpy(msgs, n, exp, log, q1)


def rs_decode_batch(words, points, k, mt, it):
    return rs_decode_batch_kernel(np.ascontiguousarray(words, dtype=np.int64),
                                  np.ascontiguousarray(points, dtype=np.int64), k, mt, it)


def fisher_yates(draws):
    return fisher_yates_kernel(np.ascontiguousarray(draws, dtype=np.int64))
