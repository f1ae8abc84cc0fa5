"""
Command-line driver.

    qdlock dhlst      simulate one-bit-key locking
    qdlock fhs        FHS key/information bookkeeping, optional pipeline run
    qdlock send-file  lock, transmit and unlock a file
    qdlock rates      erasure-channel rate curves
    qdlock replay     re-run a manifest and compare its results

Every run writes a key = value manifest. Effective parameters come from
flags, then ``--config`` (key = value lines), then built-in defaults.

Exit codes: 0 ok, 1 internal failure, 2 invalid arguments, 3 key file
problem, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import re
import sys
import tempfile
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    CAPACITY_COLUMNS, DEFAULT_QKD_FACTOR, DEFAULT_R_EXP, KAPPA_COLUMNS, MEGABIT, InfoReport,
    capacity_curve, fhs_locked_bound, fhs_report, kappa_sweep, write_rows_csv,
)
from .channel import transmit_block
from .coding import ConcatenatedCode
from .core import LOST, BitString, ChannelParams, ContractError, RngStream, draw_bits
from .dhlst import DhlstKey, dhlst_locked_bound, simulate_dhlst
from .fec import expand_bases, fec_collapse, fec_expand, repetition_factor, transmit_repeated
from .fhs import (
    KeyFileError, LockingKey, fhs_decode_blocks, fhs_encode, read_key, receiver_bases,
    session_qubits, write_key,
)

log = logging.getLogger("qdlock")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_KEY, EXIT_IO = 0, 1, 2, 3, 4
MANIFEST_FORMAT = "qdlock-manifest/1"
META_KEYS = {"format", "artifact_version", "command", "scheme", "started_at", "finished_at"}

# stream ids under the run seed
STREAM_KEY, STREAM_MESSAGE, STREAM_CHANNEL, STREAM_DHLST = 1, 2, 3, 4


_ROW_KEY = re.compile(r"row\d+\.")


class UsageError(Exception):
    pass


# --- parameter plumbing ------------------------------------------------------


def _int(text) -> int:
    return int(float(text)) if isinstance(text, str) and ("e" in text.lower() or "." in text) else int(text)


def _onoff(text) -> bool:
    t = str(text).strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _code(text) -> tuple:
    parts = tuple(int(x) for x in str(text).replace(",", " ").split())
    if len(parts) != 3:
        raise ValueError("code is 'm,n_rs,k_rs'")
    return parts


# name -> (parser, default, help); order fixes manifest field order
PARAMS = {
    "dhlst": {
        "eta": (float, 0.552, "single-photon transmittance"),
        "eb": (float, 0.004, "bit error rate"),
        "n_bits": (_int, 8_000_000, "message length in bits"),
        "key_bit": (int, 0, "one-bit key (0 = Z, 1 = Y)"),
        "seed": (_int, 0, "run seed"),
    },
    "fhs": {
        "eta": (float, 0.54, None),
        "eb": (float, 0.004, None),
        "epsilon": (float, 1e-9, "information leakage"),
        "n_bits": (_int, 64 * MEGABIT, "session size in qubits"),
        "sweep": (str, "", "start:stop:step over n (qubits), inclusive"),
        "rexp": (float, DEFAULT_R_EXP, "effective expansion factor"),
        "code": (_code, (6, 63, 42), "m,n_rs,k_rs"),
        "simulate": (_onoff, False, "also run the encode/channel/decode pipeline"),
        "max_blocks": (_int, 200, "block budget for --simulate"),
        "seed": (_int, 0, None),
    },
    "send-file": {
        "in": (str, "", "input file"),
        "eta": (float, 0.33, None),
        "eb": (float, 0.004, None),
        "epsilon": (float, 1e-9, None),
        "key_file": (str, "", "sender key; written if absent"),
        "receiver_key_file": (str, "", "receiver key (defaults to --key-file)"),
        "fec": (_onoff, True, "per-qubit repetition on|off"),
        "repeat": (_int, 0, "repetition factor, 0 = ceil(50/eta)"),
        "fec_mode": (str, "fused", "fused (group-count sampling) or literal"),
        "on_failure": (str, "zero", "fill for undecodable blocks: zero or guess"),
        "code": (_code, (6, 63, 42), None),
        "rexp": (float, DEFAULT_R_EXP, None),
        "seed": (_int, 0, None),
    },
    "rates": {
        "p_grid": (str, "0.01:0.49:0.02", "start:stop:step or comma list"),
        "eb": (float, 0.0, None),
        "exp_points": (str, "", "CSV of measured p,rate"),
        "qkd_factor": (float, DEFAULT_QKD_FACTOR, "QKD+OTP rate as a fraction of 1-p"),
        "session_bits": (_int, 0, "session size for key amortisation, 0 = asymptotic"),
        "epsilon": (float, 1e-9, None),
        "rexp": (float, DEFAULT_R_EXP, None),
    },
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


def resolve_params(command: str, ns: argparse.Namespace) -> dict:
    spec = PARAMS[command]
    params = {name: default for name, (_, default, _) in spec.items()}
    if getattr(ns, "config", None):
        for key, value in read_config(ns.config).items():
            if key.startswith("result.") or key in META_KEYS:
                continue
            name = key.removeprefix("param.").replace("-", "_")
            if name not in spec:
                raise UsageError(f"unknown config key {key!r} for {command}")
            try:
                params[name] = spec[name][0](value)
            except ValueError as exc:
                raise UsageError(f"config {key}: {exc}") from exc
    for name in spec:
        value = getattr(ns, name, None)
        if value is not None:
            params[name] = value
    return params


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    return str(v)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(path, command: str, scheme: str, params: dict, results: dict,
                   started: str) -> None:
    lines = [
        "# qdlock run manifest",
        f"format = {MANIFEST_FORMAT}",
        f"artifact_version = {__version__}",
        f"command = {command}",
        f"scheme = {scheme}",
    ]
    lines += [f"param.{k} = {_fmt_value(v)}" for k, v in params.items()]
    lines += [f"result.{k} = {_fmt_value(v)}" for k, v in results.items()]
    lines += [f"started_at = {started}", f"finished_at = {_now()}"]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict:
    return read_config(path)


def _channel(params) -> ChannelParams:
    return ChannelParams(params["eta"], params["eb"])


def _report_fields(rep: InfoReport) -> dict:
    return {"n": rep.n, "r": rep.r, "i_ab": rep.i_ab, "i_ae_bound": rep.i_ae_bound, "kappa": rep.kappa}


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands -------------------------------------------------------------


def cmd_dhlst(params: dict, out: Path) -> dict:
    ch = _channel(params)
    key = DhlstKey(params["key_bit"])
    n = params["n_bits"]
    if n < 1:
        raise ContractError("--n-bits must be >= 1")
    run = simulate_dhlst(n, key, ch, RngStream(params["seed"], STREAM_DHLST))
    bound = dhlst_locked_bound(n)
    rep = InfoReport.build(n, key.length, run.i_acc_analytic * n, bound)
    results = {
        "eta_measured": run.eta_measured,
        "e_b_measured": run.e_b_measured,
        "detected": run.detected,
        "errors": run.errors,
        "i_acc_per_bit_analytic": run.i_acc_analytic,
        "i_acc_per_bit_mc": run.i_acc_mc,
        "i_acc_per_bit_mc_stderr": run.i_acc_mc_stderr,
        "locked_bound_per_bit": bound / n,
        **_report_fields(rep),
    }
    row = {"eta": ch.eta, "e_b": ch.e_b, "n_bits": n, "key_bit": key.bit, **results}
    write_rows_csv(out / "dhlst.csv", list(row), [row])
    return results


def _sweep_values(text: str) -> list[int]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"--sweep expects start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError("--sweep needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [int(round(start + i * step)) for i in range(count)]


def _simulate_fhs(params: dict, code: ConcatenatedCode) -> dict:
    """Run whole blocks of random data through the pipeline."""
    n_blocks = max(1, min(params["max_blocks"], params["n_bits"] // code.codeword_bits))
    msg_bits = n_blocks * code.message_bits
    seed = params["seed"]
    key = LockingKey.generate(n_blocks * code.codeword_bits, params["epsilon"],
                              RngStream(seed, STREAM_KEY))
    msg = draw_bits(RngStream(seed, STREAM_MESSAGE), msg_bits)
    ct = fhs_encode(msg, key, code)
    bases = receiver_bases(key, ct.block_meta)
    outcomes = transmit_block(ct.symbols, bases, _channel(params), RngStream(seed, STREAM_CHANNEL))
    bits, ok = fhs_decode_blocks(outcomes, key, ct.block_meta)
    exact = ok & np.all(bits == msg.bits.reshape(n_blocks, -1), axis=1)
    det = outcomes != LOST
    return {
        "sim_blocks": n_blocks,
        "sim_recovery_rate": float(exact.mean()),
        "sim_eta_measured": float(det.mean()),
        "sim_e_b_measured": float(np.mean(outcomes[det] != ct.symbols.bits[det])) if det.any() else 0.0,
    }


def cmd_fhs(params: dict, out: Path) -> dict:
    ns = _sweep_values(params["sweep"]) if params["sweep"] else [params["n_bits"]]
    if min(ns) < 1:
        raise ContractError("session size must be >= 1")
    ch = _channel(params)
    rows = kappa_sweep(ch.eta, ch.e_b, params["epsilon"], ns, params["rexp"])
    write_rows_csv(out / "kappa_sweep.csv", KAPPA_COLUMNS, rows)
    results = {"rows": len(rows)}
    for i, row in enumerate(rows):
        results[f"row{i}.n"] = row.n_bits
        results[f"row{i}.r"] = row.r_bits
        results[f"row{i}.i_ab"] = row.i_ab_bits
        results[f"row{i}.i_ae_bound"] = row.i_ae_bound_bits
        results[f"row{i}.kappa"] = row.kappa
    if params["simulate"]:
        results.update(_simulate_fhs(params, ConcatenatedCode.from_params(*params["code"])))
    return results


def _bit_agreement(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(a == b)) if a.size else 1.0


def cmd_send_file(params: dict, out_path: Path, manifest_path: Path) -> dict:
    if not params["in"]:
        raise UsageError("--in is required")
    if not params["key_file"]:
        raise UsageError("--key-file is required")
    if params["fec_mode"] not in ("fused", "literal"):
        raise UsageError("--fec-mode is fused or literal")
    if params["on_failure"] not in ("zero", "guess"):
        raise UsageError("--on-failure is zero or guess")
    code = ConcatenatedCode.from_params(*params["code"])
    ch = _channel(params)
    seed = params["seed"]
    try:
        data = Path(params["in"]).read_bytes()
    except OSError as exc:
        raise IOError(f"cannot read {params['in']}: {exc}") from exc
    if not data:
        raise UsageError("input file is empty")
    msg = BitString.from_bytes(data)
    n_qubits = session_qubits(msg.length, code)

    key_path = Path(params["key_file"])
    if key_path.exists():
        key = read_key(key_path)
        if key.security.n_qubits < n_qubits:
            raise KeyFileError(f"{key_path} covers {key.security.n_qubits} qubits, "
                               f"this file needs {n_qubits}")
    else:
        key = LockingKey.generate(n_qubits, params["epsilon"], RngStream(seed, STREAM_KEY))
        try:
            write_key(key_path, key)
        except OSError as exc:
            raise IOError(f"cannot write key {key_path}: {exc}") from exc
    rkey = read_key(params["receiver_key_file"]) if params["receiver_key_file"] else key

    ct = fhs_encode(msg, key, code)
    bases = receiver_bases(rkey, ct.block_meta)
    rng = RngStream(seed, STREAM_CHANNEL)
    m = (params["repeat"] or repetition_factor(ch.eta)) if params["fec"] else 1
    if m > 1 and params["fec_mode"] == "literal":
        outcomes = fec_collapse(transmit_block(fec_expand(ct.symbols, m), expand_bases(bases, m),
                                               ch, rng), m)
    elif m > 1:
        outcomes = transmit_repeated(ct.symbols, bases, m, ch, rng)
    else:
        outcomes = transmit_block(ct.symbols, bases, ch, rng)

    bits, ok = fhs_decode_blocks(outcomes, rkey, ct.block_meta, force=params["on_failure"] == "guess")
    if params["on_failure"] == "zero":
        bits[~ok] = 0
    recovered = bits.reshape(-1)[: msg.length]
    result_bytes = np.packbits(recovered).tobytes()
    try:
        out_path.write_bytes(result_bytes)
    except OSError as exc:
        raise IOError(f"cannot write {out_path}: {exc}") from exc

    rep = fhs_report(n_qubits, ch.eta, ch.e_b, key.security.epsilon, params["rexp"], fec_factor=m)
    failed = np.flatnonzero(~ok)
    return {
        "input_bytes": len(data),
        "input_sha256": hashlib.sha256(data).hexdigest(),
        "output_sha256": hashlib.sha256(result_bytes).hexdigest(),
        "bit_exact": bool(result_bytes == data),
        "bit_agreement": _bit_agreement(recovered, msg.bits),
        "compared_bits": int(msg.length),
        "code": code.describe(),
        "code_rate": code.rate,
        "blocks": ct.block_meta.n_blocks,
        "pad_bits": ct.block_meta.pad_bits,
        "repetition": m,
        "channel_uses": len(ct.symbols) * m,
        "failed_blocks": int(failed.size),
        "failed_block_ids": " ".join(str(i) for i in failed) or "none",
        "i_ae_base_bound": fhs_locked_bound(n_qubits, key.security.epsilon, params["rexp"]),
        **_report_fields(rep),
    }


def _p_grid(text: str) -> list[float]:
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def _read_exp_points(path: str) -> list[tuple[float, float]]:
    pts = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line[0].isalpha():
                    continue
                p, r = line.split(",")[:2]
                pts.append((float(p), float(r)))
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc}") from exc
    return pts


def cmd_rates(params: dict, out: Path) -> dict:
    try:
        grid = _p_grid(params["p_grid"])
    except ValueError as exc:
        raise UsageError(f"bad --p-grid: {exc}") from exc
    pts = _read_exp_points(params["exp_points"]) if params["exp_points"] else []
    rows = capacity_curve(grid, pts, e_b=params["eb"], qkd_factor=params["qkd_factor"],
                          session_bits=params["session_bits"] or None,
                          epsilon=params["epsilon"], r_exp=params["rexp"])
    write_rows_csv(out / "capacity.csv", CAPACITY_COLUMNS, rows)
    results = {"rows": len(rows)}
    for i, row in enumerate(rows):
        for k, v in asdict(row).items():
            results[f"row{i}.{k}"] = v
    return results


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdlock", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, spec in PARAMS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="key = value parameter file (manifests work too)")
        if command == "send-file":
            p.add_argument("--out", required=True, help="output file")
            p.add_argument("--manifest", help="manifest path (default: OUT.manifest.txt)")
        else:
            p.add_argument("--out", default=".", help="output directory")
        for name, (typ, default, help_) in spec.items():
            dest = {"in": "in"}.get(name, name)
            p.add_argument(_flag(name), dest=dest, type=typ, default=None,
                           help=(help_ or "") + f" (default {_fmt_value(default)})")
    rp = sub.add_parser("replay", help="re-run a manifest and compare numeric results")
    rp.add_argument("manifest")
    return parser


def _run(command: str, params: dict, ns) -> tuple[dict, Path]:
    if command == "send-file":
        out_path = Path(ns.out)
        manifest = Path(ns.manifest) if getattr(ns, "manifest", None) else Path(str(out_path) + ".manifest.txt")
        return cmd_send_file(params, out_path, manifest), manifest
    out = _outdir(ns.out)
    fn = {"dhlst": cmd_dhlst, "fhs": cmd_fhs, "rates": cmd_rates}[command]
    return fn(params, out), out / "manifest.txt"


def _scheme(command: str) -> str:
    return {"dhlst": "dhlst", "fhs": "fhs", "send-file": "fhs", "rates": "analysis"}[command]


def execute(command: str, params: dict, ns) -> dict:
    started = _now()
    t0 = time.perf_counter()
    results, manifest = _run(command, params, ns)
    log.info("%s finished in %.2f s", command, time.perf_counter() - t0)
    write_manifest(manifest, command, _scheme(command), params, results, started)
    return results


def replay(path: str) -> int:
    m = read_manifest(path)
    command = m.get("command")
    if command not in PARAMS:
        raise UsageError(f"{path} is not a qdlock manifest")
    with tempfile.TemporaryDirectory() as tmp:
        ns = argparse.Namespace(config=path)
        params = resolve_params(command, ns)
        if command == "send-file":
            ns.out = os.path.join(tmp, "replay.out")
            ns.manifest = os.path.join(tmp, "replay.manifest.txt")
        else:
            ns.out = tmp
        results = execute(command, params, ns)
    expected = {k.removeprefix("result."): v for k, v in m.items() if k.startswith("result.")}
    got = {k: _fmt_value(v) for k, v in results.items()}
    diff = sorted(k for k in expected.keys() | got.keys() if expected.get(k) != got.get(k))
    for k in diff:
        print(f"MISMATCH {k}: manifest={expected.get(k)} replay={got.get(k)}")
    print(f"replay {'identical' if not diff else 'differs'}: {len(expected)} results compared")
    return EXIT_OK if not diff else EXIT_INTERNAL


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.command == "replay":
            return replay(ns.manifest)
        params = resolve_params(ns.command, ns)
        results = execute(ns.command, params, ns)
        for k, v in results.items():
            if not _ROW_KEY.match(k) or ns.verbose:
                text = _fmt_value(v)
                if len(text) > 120 and not ns.verbose:
                    text = text[:100] + " ... (full list in manifest)"
                print(f"{k} = {text}")
        return EXIT_OK
    except (UsageError, ContractError) as exc:
        print(f"qdlock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyFileError as exc:
        print(f"qdlock: key error: {exc}", file=sys.stderr)
        return EXIT_KEY
    except OSError as exc:
        print(f"qdlock: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        log.exception("internal failure")
        print(f"qdlock: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
