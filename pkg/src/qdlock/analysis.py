"""
Information accounting for the locking schemes.

All quantities are in bits and all logarithms are base 2. Data sizes quoted
in "Mb" are read as 10**6 qubits sent (``MEGABIT``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import LOST, ContractError
from .fhs import fhs_key_length

MEGABIT = 10**6
DEFAULT_R_EXP = 16.12
DEFAULT_QKD_FACTOR = 0.5
CSV_FLOAT = "{:.12g}"


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    # log1p keeps the (1-p) term accurate for small p
    return -p * math.log2(p) - (1.0 - p) * math.log1p(-p) / math.log(2.0)


def mutual_info_rate(eta: float, e_b: float) -> float:
    """Bits per sent bit over an erasure channel followed by a BSC(e_b)."""
    return eta * (1.0 - binary_entropy(e_b))


def fhs_unlocked_info(n: float, eta: float, e_b: float, r_exp: float = DEFAULT_R_EXP) -> float:
    if n < 1 or r_exp <= 0:
        raise ContractError("need n >= 1 and r_exp > 0")
    return eta * n / r_exp * (1.0 - binary_entropy(e_b))


def fhs_locked_bound(n: float, epsilon: float, r_exp: float = DEFAULT_R_EXP) -> float:
    """Keyless accessible-information bound 6*eps*n/r_exp + H(eps)."""
    if n < 0 or r_exp <= 0 or not 0.0 <= epsilon <= 1.0:
        raise ContractError("invalid locked-bound arguments")
    return 6.0 * epsilon * n / r_exp + binary_entropy(epsilon)


def locking_efficiency(i_ab: float, i_ae: float, r: float) -> float:
    if r <= 0:
        raise ContractError("key length must be positive")
    return (i_ab - i_ae - r) / r


@dataclass(frozen=True)
class InfoReport:
    n: int
    r: int
    i_ab: float
    i_ae_bound: float
    kappa: float

    @classmethod
    def build(cls, n: int, r: int, i_ab: float, i_ae_bound: float) -> "InfoReport":
        return cls(int(n), int(r), float(i_ab), float(i_ae_bound),
                   locking_efficiency(i_ab, i_ae_bound, r))


def fhs_report(n: int, eta: float, e_b: float, epsilon: float, r_exp: float = DEFAULT_R_EXP,
               fec_factor: int = 1) -> InfoReport:
    """Analytic FHS bookkeeping for a session of n qubits.

    With repetition FEC active Eve's keyless bound is multiplied by the
    repetition factor.
    """
    r = fhs_key_length(n, epsilon)
    i_ab = fhs_unlocked_info(n, eta, e_b, r_exp)
    i_ae = fec_factor * fhs_locked_bound(n, epsilon, r_exp)
    return InfoReport.build(n, r, i_ab, i_ae)


@dataclass(frozen=True)
class KappaRow:
    eta: float
    e_b: float
    epsilon: float
    n_bits: int
    r_bits: int
    i_ab_bits: float
    i_ae_bound_bits: float
    kappa: float


KAPPA_COLUMNS = ("eta", "e_b", "epsilon", "n_bits", "r_bits", "i_ab_bits", "i_ae_bound_bits", "kappa")


def kappa_sweep(eta: float, e_b: float, epsilon: float, n_values: Iterable[int],
                r_exp: float = DEFAULT_R_EXP) -> list[KappaRow]:
    rows = []
    for n in n_values:
        rep = fhs_report(int(n), eta, e_b, epsilon, r_exp)
        rows.append(KappaRow(eta, e_b, epsilon, rep.n, rep.r, rep.i_ab, rep.i_ae_bound, rep.kappa))
    return rows


def kappa_crossing(eta: float, e_b: float, epsilon: float, r_exp: float = DEFAULT_R_EXP,
                   target: float = 1.0, hi: int = 10**13) -> int:
    """Smallest session size n (qubits) with kappa(n) >= target.

    kappa is increasing in n on the searched range (the unlocked information
    is linear in n while the key grows logarithmically), so integer
    bisection applies.
    """
    def kappa(n):
        return fhs_report(n, eta, e_b, epsilon, r_exp).kappa

    if kappa(hi) < target:
        raise ValueError(f"kappa does not reach {target} below n={hi}")
    lo = 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if kappa(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def plugin_mutual_info(sent: np.ndarray, received: np.ndarray) -> tuple[float, float]:
    """Plug-in estimate of I(sent; received) and its delta-method standard error.

    ``sent`` holds bits, ``received`` holds 0/1/LOST. Erasures are a third
    output symbol, so they carry no information about the sent bit.
    """
    x = np.asarray(sent, dtype=np.int64)
    y = np.asarray(received, dtype=np.int64)
    if x.shape != y.shape or x.size == 0:
        raise ContractError("need equal-length non-empty samples")
    yi = np.where(y == LOST, 2, y)
    counts = np.bincount(x * 3 + yi, minlength=6).reshape(2, 3).astype(np.float64)
    n = counts.sum()
    pxy = counts / n
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.where(pxy > 0, np.log2(pxy / (px * py)), 0.0)
    mi = float((pxy * pmi).sum())
    second = float((pxy * pmi**2).sum())
    stderr = math.sqrt(max(second - mi * mi, 0.0) / n)
    return mi, stderr


@dataclass(frozen=True)
class CapacityPoint:
    p: float
    classical: float
    private: float
    dl_rate: float
    dhlst_rate: float
    qkd_otp_rate: float


CAPACITY_COLUMNS = ("p", "classical", "private", "dl_rate", "dhlst_rate", "qkd_otp_rate")


def dl_rate_model(p: float, e_b: float = 0.0, session_bits: int | None = None,
                  epsilon: float = 1e-9, r_exp: float = DEFAULT_R_EXP) -> float:
    """Secure rate per channel use of quantum-locked key distribution.

    (1-p)(1-H(e_b)) less the key and keyless-leakage cost amortised over a
    session of ``session_bits`` channel uses; ``None`` means the asymptotic
    limit where that cost vanishes.
    """
    rate = (1.0 - p) * (1.0 - binary_entropy(e_b))
    if session_bits is not None:
        cost = fhs_key_length(session_bits, epsilon) + fhs_locked_bound(session_bits, epsilon, r_exp)
        rate -= cost / session_bits
    return rate


def capacity_curve(p_grid: Sequence[float], exp_points: Sequence[tuple[float, float]] = (),
                   e_b: float = 0.0, qkd_factor: float = DEFAULT_QKD_FACTOR,
                   session_bits: int | None = None, epsilon: float = 1e-9,
                   r_exp: float = DEFAULT_R_EXP) -> list[CapacityPoint]:
    """Erasure-channel rates on a grid of erasure probabilities.

    ``dl_rate`` is linearly interpolated from measured ``exp_points`` inside
    their p range and taken from :func:`dl_rate_model` elsewhere. The DHLST
    session key (one bit) amortises to zero per use.
    """
    pts = sorted((float(a), float(b)) for a, b in exp_points)
    xp = np.array([a for a, _ in pts])
    fp = np.array([b for _, b in pts])
    out = []
    for p in p_grid:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ContractError(f"erasure probability out of range: {p}")
        if pts and xp[0] <= p <= xp[-1]:
            dl = float(np.interp(p, xp, fp))
        else:
            dl = dl_rate_model(p, e_b, session_bits, epsilon, r_exp)
        out.append(CapacityPoint(
            p=p,
            classical=1.0 - p,
            private=max(0.0, 1.0 - 2.0 * p),
            dl_rate=dl,
            dhlst_rate=(1.0 - p) * (1.0 - binary_entropy(e_b)),
            qkd_otp_rate=qkd_factor * (1.0 - p),
        ))
    return out


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return CSV_FLOAT.format(float(v))


def write_rows_csv(path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            d = asdict(row) if not isinstance(row, dict) else row
            w.writerow([_fmt(d[c]) for c in columns])
