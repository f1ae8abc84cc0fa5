"""
JIT switch for the numeric kernels.

Set ``QDLOCK_DISABLE_JIT=1`` in the environment before importing the package
to run every kernel on its pure-numpy/Python path. Useful for debugging and
for the kernel benchmark.
"""

import os

_flag = os.environ.get("QDLOCK_DISABLE_JIT", "").strip().lower()
JIT_ENABLED = _flag not in ("1", "true", "yes", "on")

if JIT_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


__all__ = ["JIT_ENABLED", "njit"]
