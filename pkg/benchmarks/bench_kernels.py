"""
Time the codec kernels with numba and with the pure-numpy fallback.

Each backend runs in its own interpreter because ``QDLOCK_DISABLE_JIT`` is
read at import time.

    python benchmarks/bench_kernels.py [--blocks 2000] [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from qdlock._jit import JIT_ENABLED
from qdlock.coding import PRODUCTION_CODE as C, _kernels as K
from qdlock.extractor import derive_permutation
from qdlock.core import BitString

blocks, repeat = int(sys.argv[1]), int(sys.argv[2])
g = np.random.default_rng(1)
msgs = g.integers(0, 2, size=(blocks, 252), dtype=np.uint8)
words = C.encode_batch(msgs).astype(np.int8)
words[g.random(words.shape) < 0.5] = -1
F = C.outer.field
syms = g.integers(0, 64, size=(blocks, 42))
soft = g.integers(-1, 2, size=(blocks * 63, 64)).astype(np.int32)
outer = K.rs_encode_batch(syms, 63, F.exp, F.log, F.q1)
outer[g.random(outer.shape) < 0.3] = -1
seed = BitString.from_int(12345, 64)

cases = {
    "fwht (inner correlations)": lambda: K.fwht(soft),
    "rs_encode_batch": lambda: K.rs_encode_batch(syms, 63, F.exp, F.log, F.q1),
    "rs_decode_batch (30% erasures)": lambda: C.outer.decode_batch(outer),
    "fisher_yates (n=4032, per block)": lambda: [derive_permutation(seed, 4032, b) for b in range(min(blocks, 200))],
    "concat decode (50% erasures)": lambda: C.decode_batch(words),
}
def best_of(fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


out = {"jit": JIT_ENABLED, "timings": {}}
for name, fn in cases.items():
    fn()  # warm-up, triggers compilation
    out["timings"][name] = best_of(fn)
print(json.dumps(out))
"""


def run(disable: bool, blocks: int, repeat: int) -> dict:
    env = dict(os.environ, QDLOCK_DISABLE_JIT="1" if disable else "0")
    r = subprocess.run([sys.executable, "-c", WORKER, str(blocks), str(repeat)],
                       env=env, capture_output=True, text=True, check=True)
    return json.loads(r.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--blocks", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print raw JSON")
    args = ap.parse_args(argv)
    jit = run(False, args.blocks, args.repeat)
    ref = run(True, args.blocks, args.repeat)
    if args.json:
        print(json.dumps({"numba": jit, "numpy": ref}, indent=2))
        return
    print(f"{args.blocks} blocks, best of {args.repeat}")
    print(f"{'kernel':36s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, t_jit in jit["timings"].items():
        t_ref = ref["timings"][name]
        print(f"{name:36s} {t_jit:10.4f} {t_ref:10.4f} {t_ref / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
